#include "pmfc/fixedpoint.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pmfc/encoder.hpp"
#include "pmfc/hadamard.hpp"
#include "pmfc/numerics.hpp"

namespace pmfc {

namespace {

constexpr int kScanPoints = 10000;

void require_positive_powers(double p1, double p2) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) {
    throw std::invalid_argument("powers must be > 0");
  }
}

// Rightmost sign-change bracket of f over [lo, hi] on a uniform grid, then
// bisection down to the floating-point floor.
template <class F>
double rightmost_root(F&& f, double lo, double hi, const char* what) {
  double prev_x = lo;
  double prev_f = f(lo);
  double found_lo = 0.0;
  double found_hi = 0.0;
  bool found = false;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double x = lo + (hi - lo) * i / kScanPoints;
    const double fx = f(x);
    if (prev_f == 0.0) {
      found = true;
      found_lo = found_hi = prev_x;
    } else if (fx == 0.0) {
      found = true;
      found_lo = found_hi = x;
    } else if ((prev_f > 0.0) != (fx > 0.0)) {
      found = true;
      found_lo = prev_x;
      found_hi = x;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!found) {
    throw std::runtime_error(std::string(what) + ": no root in the search interval");
  }
  if (found_lo == found_hi) return found_lo;
  return bisect(f, Bracket(found_lo, found_hi, 1e-300));
}

}  // namespace

double ozarow_residual(double rho, double p1, double p2) {
  const double one_minus = 1.0 - rho * rho;
  const double den =
      std::sqrt((p2 * one_minus + 1.0) * (p1 * one_minus + 1.0));
  return rho + (rho - std::sqrt(p1 * p2) * one_minus) / den;
}

double ozarow_rho_star(double p1, double p2) {
  require_positive_powers(p1, p2);
  return rightmost_root([&](double r) { return ozarow_residual(r, p1, p2); }, 0.0, 1.0,
                        "ozarow_rho_star");
}

double kramer_residual(double lambda, double power, int num_users) {
  return std::pow(power * num_users * lambda + 1.0, num_users - 1) -
         std::pow(power * lambda * (num_users - lambda) + 1.0, num_users);
}

double kramer_log_residual(double lambda, double power, int num_users) {
  return (num_users - 1) * std::log(power * num_users * lambda + 1.0) -
         num_users * std::log(power * lambda * (num_users - lambda) + 1.0);
}

double kramer_lambda_star(double power, int num_users) {
  if (!(power > 0.0)) throw std::invalid_argument("kramer_lambda_star: power must be > 0");
  if (num_users < 1) throw std::invalid_argument("kramer_lambda_star: num_users must be >= 1");
  if (num_users == 1) return 1.0;  // the equation degenerates to lambda = 1
  return rightmost_root(
      [&](double l) { return kramer_log_residual(l, power, num_users); },
      1.0, static_cast<double>(num_users), "kramer_lambda_star");
}

double sigma_w2_for_target(double rho_target, double p1, double p2) {
  require_positive_powers(p1, p2);
  if (!(rho_target > 0.0)) {
    throw std::invalid_argument("sigma_w2_for_target: rho_target must be > 0");
  }
  const double cross = std::sqrt(p1 * p2);
  auto magnitude = [&](double s) {
    return cross / std::sqrt((p1 + 1.0 + s) * (p2 + 1.0 + s));
  };
  const double unnoised = magnitude(0.0);
  if (rho_target > unnoised) {
    throw std::invalid_argument("sigma_w2_for_target: target exceeds the uninjected magnitude");
  }
  if (rho_target == unnoised) return 0.0;
  double hi = 1.0;
  while (magnitude(hi) > rho_target) hi *= 2.0;
  return bisect([&](double s) { return magnitude(s) - rho_target; },
                Bracket(0.0, hi, 1e-13 * std::max(1.0, hi)));
}

TwoUserFixedPoint solve_two_user(double p1, double p2) {
  TwoUserFixedPoint fp;
  fp.rho_star = ozarow_rho_star(p1, p2);
  fp.sigma_w2 = sigma_w2_for_target(fp.rho_star, p1, p2);
  fp.residual = ozarow_residual(fp.rho_star, p1, p2);
  return fp;
}

SymmetricFixedPoint forcing_powers(double power, int num_users) {
  if (!(power > 0.0)) throw std::invalid_argument("forcing_powers: power must be > 0");
  if (!is_supported_order(num_users)) {
    throw std::invalid_argument("forcing_powers: unsupported number of users " +
                                std::to_string(num_users));
  }
  SymmetricFixedPoint fp;
  const int m = num_users;
  fp.lambda_star = kramer_lambda_star(power, m);
  fp.residual = kramer_residual(fp.lambda_star, power, m);
  fp.log_residual = kramer_log_residual(fp.lambda_star, power, m);

  // Invariant cycle: the per-step ratio c drops each successive eigenvalue,
  // and c^M = 1 + M P lambda_star closes the cycle.
  const double c = (1.0 + m * power * fp.lambda_star) /
                   (1.0 + power * fp.lambda_star * (m - fp.lambda_star));
  fp.eigen_cycle.resize(m);
  fp.eigen_cycle[0] = fp.lambda_star;
  for (int k = 1; k < m; ++k) fp.eigen_cycle[k] = fp.eigen_cycle[k - 1] / c;

  // Forced powers: at step n the leading-ratio target is c^n, which pins
  // P_n = (c^n - 1) / (M lambda_n^{(1)}); the state is advanced alongside.
  std::vector<double> lam(m, 1.0);
  fp.forcing_powers.reserve(m - 1);
  double c_pow = 1.0;
  for (int n = 1; n < m; ++n) {
    c_pow *= c;
    const double pn = (c_pow - 1.0) / (m * lam[0]);
    if (!(pn >= 0.0)) {
      throw std::runtime_error("forcing_powers: negative forced power (normalization error)");
    }
    fp.forcing_powers.push_back(pn);
    lam = symmetric_lambda_step(lam, pn, m);
  }

  // End-state check by direct iteration rather than trusting the algebra.
  for (int k = 0; k < m; ++k) {
    if (std::abs(lam[k] - fp.eigen_cycle[k]) > 1e-9) {
      throw std::runtime_error("forcing_powers: forced state misses the target cycle");
    }
  }
  std::vector<double> cycle = fp.eigen_cycle;
  for (int step = 0; step < m; ++step) {
    cycle = symmetric_lambda_step(cycle, power, m);
    for (int k = 0; k < m; ++k) {
      if (std::abs(cycle[k] - fp.eigen_cycle[k]) > 1e-9) {
        throw std::runtime_error("forcing_powers: target cycle is not invariant");
      }
    }
  }
  return fp;
}

}  // namespace pmfc
