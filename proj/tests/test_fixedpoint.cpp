#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pmfc/encoder.hpp"
#include "pmfc/fixedpoint.hpp"
#include "pmfc/numerics.hpp"
#include "pmfc/rates.hpp"

using namespace pmfc;

TEST_CASE("two-user fixed point matches the reduced cubic at unit powers") {
  const double rho_star = ozarow_rho_star(1.0, 1.0);
  CHECK(std::abs(ozarow_residual(rho_star, 1.0, 1.0)) <= 1e-10);

  // Independent oracle: at P1 = P2 = 1 the equation reduces to
  // rho^3 - rho^2 - 3 rho + 1 = 0.
  auto cubic = [](double r) { return r * r * r - r * r - 3.0 * r + 1.0; };
  const double oracle_root = bisect(cubic, Bracket(0.0, 1.0, 1e-14));
  CHECK(std::abs(rho_star - oracle_root) <= 1e-9);
  CHECK(rho_star == doctest::Approx(0.31110).epsilon(1e-4));
}

TEST_CASE("two-user fixed point is increasing in power") {
  double prev = 0.0;
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    const double rho = ozarow_rho_star(p, p);
    CHECK(rho > prev);
    CHECK(rho > 0.0);
    CHECK(rho < 1.0);
    CHECK(std::abs(ozarow_residual(rho, p, p)) <= 1e-10);
    prev = rho;
  }
}

TEST_CASE("symmetric fixed point") {
  CHECK(kramer_lambda_star(1.0, 1) == 1.0);

  const double l2 = kramer_lambda_star(1.0, 2);
  CHECK(std::abs(l2 - (1.0 + ozarow_rho_star(1.0, 1.0))) <= 1e-9);
  CHECK(l2 == doctest::Approx(1.31110).epsilon(1e-4));

  const double l4 = kramer_lambda_star(1.0, 4);
  CHECK(l4 == doctest::Approx(1.879).epsilon(1e-3));
  CHECK(std::abs(kramer_residual(l4, 1.0, 4)) <= 1e-10);

  for (int m : {2, 4, 8}) {
    for (double p : {0.5, 1.0, 4.0}) {
      const double l = kramer_lambda_star(p, m);
      CHECK(l >= 1.0);
      CHECK(l <= m);
      CHECK(std::abs(kramer_log_residual(l, p, m)) <= 1e-10);
    }
  }
}

TEST_CASE("injection variance solver") {
  CHECK(sigma_w2_for_target(0.5, 1.0, 1.0) == 0.0);

  const double rho_star = ozarow_rho_star(1.0, 1.0);
  const double s = sigma_w2_for_target(rho_star, 1.0, 1.0);
  CHECK(s == doctest::Approx(1.2144).epsilon(1e-3));
  // 1/(2 + s) == rho_star at unit powers.
  CHECK(std::abs(1.0 / (2.0 + s) - rho_star) <= 1e-10);

  CHECK_THROWS_AS(sigma_w2_for_target(0.6, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_w2_for_target(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("injection variance reproduces the target through the recursion") {
  NoiseSource rng(55, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p1 = 0.25 + 4.0 * rng.next_uniform();
    const double p2 = 0.25 + 4.0 * rng.next_uniform();
    const double max = std::sqrt(p1 * p2 / ((p1 + 1.0) * (p2 + 1.0)));
    const double target = max * (0.2 + 0.79 * rng.next_uniform());
    const double s = sigma_w2_for_target(target, p1, p2);
    CHECK(std::abs(std::abs(two_user_rho_step(0.0, p1, p2, 1.0 + s)) - target) <= 1e-10);
  }
}

TEST_CASE("solve_two_user pins the first recursion step at rho_star") {
  for (auto [p1, p2] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {1.0, 4.0}, {2.0, 3.0}}) {
    const TwoUserFixedPoint fp = solve_two_user(p1, p2);
    CHECK(std::abs(fp.residual) <= 1e-10);
    const double rho2 = two_user_rho_step(0.0, p1, p2, 1.0 + fp.sigma_w2);
    CHECK(std::abs(std::abs(rho2) - fp.rho_star) <= 1e-10);
    // From there the magnitude is locked and the sign alternates.
    const double rho3 = two_user_rho_step(rho2, p1, p2, 1.0);
    CHECK(std::abs(rho3 - fp.rho_star) <= 1e-9);
  }
}

TEST_CASE("forcing powers land on the invariant cycle") {
  for (int m : {1, 2, 4, 8}) {
    const SymmetricFixedPoint fp = forcing_powers(1.0, m);
    CHECK(static_cast<int>(fp.forcing_powers.size()) == m - 1);
    for (const double p : fp.forcing_powers) CHECK(p >= 0.0);

    // Re-run the forced recursion from scratch.
    std::vector<double> cycle(m, 1.0);
    for (int n = 0; n < m - 1; ++n) {
      cycle = symmetric_lambda_step(cycle, fp.forcing_powers[n], m);
    }
    for (int k = 0; k < m; ++k) CHECK(std::abs(cycle[k] - fp.eigen_cycle[k]) <= 1e-9);

    // Invariance under M further steps at the steady power.
    for (int n = 0; n < m; ++n) cycle = symmetric_lambda_step(cycle, 1.0, m);
    for (int k = 0; k < m; ++k) CHECK(std::abs(cycle[k] - fp.eigen_cycle[k]) <= 1e-9);

    double sum = 0.0;
    for (const double l : fp.eigen_cycle) sum += l;
    CHECK(sum == doctest::Approx(m).epsilon(1e-9));
  }
  CHECK_THROWS_AS(forcing_powers(1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(forcing_powers(0.0, 4), std::invalid_argument);
}

TEST_CASE("two-user and symmetric routes agree at M = 2") {
  const SymmetricFixedPoint fp = forcing_powers(1.0, 2);
  const double rho_star = ozarow_rho_star(1.0, 1.0);
  CHECK(std::abs(fp.eigen_cycle[0] - (1.0 + rho_star)) <= 1e-9);
  CHECK(std::abs(fp.eigen_cycle[1] - (1.0 - rho_star)) <= 1e-9);

  for (double p : {0.5, 1.0, 4.0}) {
    const double lambda = kramer_lambda_star(p, 2);
    const double rho = ozarow_rho_star(p, p);
    CHECK(std::abs(symmetric_sum_rate_bits(lambda, p, 2) - ozarow_sum_rate_bits(rho, p, p)) <=
          1e-9);
  }
}
