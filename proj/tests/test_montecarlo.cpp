#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pmfc/fixedpoint.hpp"
#include "pmfc/montecarlo.hpp"
#include "pmfc/rates.hpp"

using namespace pmfc;

namespace {

SchemeConfig point_to_point_config(double power = 1.0, double target = 0.0455) {
  return {Scheme::point_to_point, 1, {power}, 1.0, {target}, true};
}

SchemeConfig two_user_config(double p1 = 1.0, double p2 = 1.0, double target = 0.0455) {
  return {Scheme::two_user, 2, {p1, p2}, 1.0, {target, target}, true};
}

SchemeConfig symmetric_config(int m, double power = 1.0, double target = 0.0455) {
  return {Scheme::symmetric, m, std::vector<double>(m, power), 1.0,
          std::vector<double>(m, target), true};
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(build_plan(symmetric_config(3), 10), std::invalid_argument);
  SchemeConfig bad = two_user_config();
  bad.num_users = 1;
  bad.powers = {1.0};
  bad.target_error = {0.05};
  CHECK_THROWS_AS(build_plan(bad, 10), std::invalid_argument);

  SchemeConfig negative = point_to_point_config();
  negative.powers = {-1.0};
  CHECK_THROWS_AS(build_plan(negative, 10), std::invalid_argument);

  SchemeConfig target = point_to_point_config();
  target.target_error = {1.0};
  CHECK_THROWS_AS(build_plan(target, 10), std::invalid_argument);

  SchemeConfig noisy = two_user_config();
  noisy.noise_variance = 2.0;  // forcing targets assume unit noise
  CHECK_THROWS_AS(build_plan(noisy, 10), std::invalid_argument);
  noisy.forced = false;
  CHECK_NOTHROW(build_plan(noisy, 10));

  CHECK_THROWS_AS(build_plan(point_to_point_config(), 0), std::invalid_argument);
  CHECK_THROWS_AS(build_plan(point_to_point_config(), 20000), std::invalid_argument);
}

TEST_CASE("two-user plan sits on the alternating limit cycle") {
  const SchemePlan plan = build_plan(two_user_config(), 30);
  const double rho_star = ozarow_rho_star(1.0, 1.0);
  CHECK(plan.steps[0].rho == 0.0);
  CHECK(plan.steps[0].inject_variance == doctest::Approx(plan.sigma_w2).epsilon(1e-12));
  CHECK(plan.sigma_w2 > 0.0);
  for (int n = 2; n <= 30; ++n) {
    const double expected = (n % 2 == 0 ? -1.0 : 1.0) * rho_star;
    CHECK(std::abs(plan.steps[n - 1].rho - expected) <= 1e-10);
    CHECK(plan.steps[n - 1].inject_variance == 0.0);
    CHECK(plan.steps[n - 1].alpha[1] == sign_of(expected));
  }
}

TEST_CASE("forced symmetric plan reaches the eigenvalue fixed point") {
  const int m = 4;
  const SchemePlan plan = build_plan(symmetric_config(m), 40);
  const SymmetricFixedPoint fp = forcing_powers(1.0, m);
  CHECK(plan.forcing_power.size() == 3);
  for (int n = 1; n < m; ++n) {
    CHECK(plan.steps[n - 1].symbol_power[0] ==
          doctest::Approx(fp.forcing_powers[n - 1]).epsilon(1e-12));
  }
  for (int n = m; n <= 40; ++n) {
    CHECK(plan.steps[n - 1].symbol_power[0] == 1.0);
    CHECK(std::abs(plan.steps[n - 1].lambda - fp.lambda_star) <= 1e-9);
  }
  CHECK(plan.initial_power[0] == doctest::Approx(fp.forcing_powers[0]).epsilon(1e-12));
}

TEST_CASE("plans and trials are deterministic") {
  const SchemePlan a = build_plan(two_user_config(), 25);
  const SchemePlan b = build_plan(two_user_config(), 25);
  for (int n = 0; n < 25; ++n) {
    CHECK(a.steps[n].rho == b.steps[n].rho);
    for (int u = 0; u < 2; ++u) {
      CHECK(a.steps[n].coef[u].gain == b.steps[n].coef[u].gain);
      CHECK(a.steps[n].coef[u].residual_var == b.steps[n].coef[u].residual_var);
    }
  }
  const std::vector<int> cps{5, 25};
  const TrialResult r1 = run_trial(a, 42, 17, cps);
  const TrialResult r2 = run_trial(b, 42, 17, cps);
  CHECK(r1.rate_bits == r2.rate_bits);
  CHECK(r1.log_width == r2.log_width);
  CHECK(r1.message_success == r2.message_success);
  CHECK(r1.terminal_success == r2.terminal_success);
}

TEST_CASE("noise-free single-user trials decode every message at every horizon") {
  SchemeConfig config = point_to_point_config();
  config.noise_variance = 1e-9;  // near-deterministic channel
  const SchemePlan plan = build_plan(config, 10);
  std::vector<int> cps;
  for (int n = 1; n <= 10; ++n) cps.push_back(n);
  TrialOptions options;
  options.zero_noise = true;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const TrialResult r = run_trial(plan, 7, trial, cps, options);
    for (std::size_t c = 0; c < cps.size(); ++c) {
      CHECK(r.message_success[c][0]);
      CHECK(r.terminal_success[c][0]);
    }
  }
}

TEST_CASE("decode success equals terminal membership trial by trial") {
  for (const SchemeConfig& config :
       {point_to_point_config(), two_user_config(1.0, 4.0), symmetric_config(4)}) {
    const SchemePlan plan = build_plan(config, 20);
    const std::vector<int> cps{3, 11, 20};
    const BatchStats stats = run_batch(plan, 3000, 99, cps);
    CHECK(stats.equivalence_mismatches == 0);
  }
}

TEST_CASE("empirical error sits in the Wilson band at every horizon") {
  const SchemePlan plan = build_plan(point_to_point_config(), 20);
  const std::vector<int> cps{5, 20};
  const BatchStats stats = run_batch(plan, 20000, 11, cps);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    CHECK(stats.error[c][0].wilson.lo <= 0.0455);
    CHECK(0.0455 <= stats.error[c][0].wilson.hi);
  }
}

TEST_CASE("symbols stay marginally Gaussian with the scheduled power") {
  const SchemePlan plan = build_plan(two_user_config(), 20);
  const BatchStats stats = run_batch(plan, 10000, 3, {});
  const double n = static_cast<double>(stats.trials);
  for (int s = 0; s < 20; ++s) {
    for (int u = 0; u < 2; ++u) {
      CHECK(std::abs(stats.symbol_mean[s][u]) <= 3.0 / std::sqrt(n));
      CHECK(std::abs(stats.symbol_var[s][u] - 1.0) <= 3.0 * std::sqrt(2.0 / n));
    }
  }
  const PowerCheck power = verify_power_constraint(stats, plan);
  CHECK(power.all_ok);
}

TEST_CASE("empirical cross-correlation tracks the deterministic state") {
  const SchemePlan plan = build_plan(two_user_config(), 20);
  const std::uint64_t trials = 10000;
  const BatchStats stats = run_batch(plan, trials, 21, {});
  const double band = 3.0 / std::sqrt(static_cast<double>(trials));
  for (int s = 0; s < 20; ++s) {
    CHECK(std::abs(stats.pair_corr[s][0] - plan.steps[s].rho) <= band);
  }
}

TEST_CASE("per-step symbols pass a KS test against the normal law") {
  const SchemePlan plan = build_plan(two_user_config(), 20);
  const std::size_t trials = 10000;
  std::vector<std::vector<double>> samples(20 * 2);
  TrialOptions options;
  options.record_trace = true;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const TrialResult r = run_trial(plan, 23, t, {}, options);
    for (const StepTrace& row : r.trace) {
      samples[(row.step - 1) * 2 + row.user].push_back(row.symbol);
    }
  }
  for (int s = 0; s < 20; ++s) {
    for (int u = 0; u < 2; ++u) {
      auto& sample = samples[s * 2 + u];
      REQUIRE(sample.size() == trials);
      const double scale = std::sqrt(plan.steps[s].symbol_power[u]);
      const double d = oracle::ks_statistic(
          std::move(sample), [&](double x) { return oracle::normal_cdf(x / scale); });
      CHECK(oracle::ks_adjusted(d, trials) <= 1.628);  // 1% critical value
    }
  }
}

TEST_CASE("current symbols are uncorrelated with past outputs") {
  const SchemePlan plan = build_plan(two_user_config(), 6);
  const std::size_t trials = 10000;
  std::vector<std::vector<double>> xs(6 * 2);  // [step][user] samples
  std::vector<std::vector<double>> ys(6);
  TrialOptions options;
  options.record_trace = true;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const TrialResult r = run_trial(plan, 29, t, {}, options);
    for (const StepTrace& row : r.trace) {
      xs[(row.step - 1) * 2 + row.user].push_back(row.symbol);
      if (row.user == 0) ys[row.step - 1].push_back(row.y);
    }
  }
  const double band = 3.0 / std::sqrt(static_cast<double>(trials));
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k < n; ++k) {
      for (int u = 0; u < 2; ++u) {
        const auto& x = xs[(n - 1) * 2 + u];
        const auto& y = ys[k - 1];
        double sx = 0.0, sy = 0.0, sxy = 0.0, sx2 = 0.0, sy2 = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
          sx += x[i];
          sy += y[i];
          sxy += x[i] * y[i];
          sx2 += x[i] * x[i];
          sy2 += y[i] * y[i];
        }
        const double nt = static_cast<double>(trials);
        const double corr = (sxy / nt - sx / nt * sy / nt) /
                            std::sqrt((sx2 / nt - sx / nt * sx / nt) *
                                      (sy2 / nt - sy / nt * sy / nt));
        CHECK(std::abs(corr) <= band);
      }
    }
  }
}

TEST_CASE("batch statistics do not depend on the thread count") {
  const SchemePlan plan = build_plan(symmetric_config(4), 15);
  const std::vector<int> cps{5, 15};
  const BatchStats a = run_batch(plan, 4000, 77, cps, 1);
  const BatchStats b = run_batch(plan, 4000, 77, cps, 4);
  CHECK(a.equivalence_mismatches == b.equivalence_mismatches);
  for (std::size_t c = 0; c < cps.size(); ++c) {
    for (int u = 0; u < 4; ++u) CHECK(a.error[c][u].errors == b.error[c][u].errors);
  }
  CHECK(a.symbol_mean == b.symbol_mean);
  CHECK(a.symbol_var == b.symbol_var);
  CHECK(a.symbol_power == b.symbol_power);
  CHECK(a.pair_corr == b.pair_corr);
  CHECK(a.time_avg_power == b.time_avg_power);
  CHECK(a.mean_rate_bits == b.mean_rate_bits);
}

TEST_CASE("forced symmetric scheme meets the power budget on time average") {
  const SchemePlan plan = build_plan(symmetric_config(4), 50);
  const BatchStats stats = run_batch(plan, 10000, 5, {});
  const PowerCheck power = verify_power_constraint(stats, plan);
  CHECK(power.all_ok);
  for (int u = 0; u < 4; ++u) {
    CHECK(stats.time_avg_power[u] <= 1.0 + 3.0 * stats.time_avg_power_se[u]);
  }
}

TEST_CASE("deterministic rate trajectory approaches the predicted rate") {
  const SchemePlan plan = build_plan(point_to_point_config(), 200);
  const auto rates = deterministic_rate_trajectory(plan);
  CHECK(std::abs(rates[0][199] - 0.5) <= 0.01);
  // The per-step width ratio settles at the constant kernel slope.
  const double late_gap = (rates[0][199] - rates[0][198]) * 200.0;
  CHECK(std::abs(late_gap) <= 0.01);
}

TEST_CASE("trace rows carry the schedule and the decode state") {
  const SchemePlan plan = build_plan(two_user_config(), 8);
  TrialOptions options;
  options.record_trace = true;
  const TrialResult r = run_trial(plan, 31, 0, {}, options);
  REQUIRE(r.trace.size() == 8 * 2);
  for (const StepTrace& row : r.trace) {
    const StepPlan& step = plan.steps[row.step - 1];
    CHECK(row.gain == step.coef[row.user].gain);
    CHECK(row.residual_var == step.coef[row.user].residual_var);
    CHECK(std::isfinite(row.log_width));
  }
  // Both users observe the same output at every step.
  for (std::size_t i = 0; i < r.trace.size(); i += 2) {
    CHECK(r.trace[i].y == r.trace[i + 1].y);
  }
}

TEST_CASE("checkpoint validation") {
  const SchemePlan plan = build_plan(point_to_point_config(), 10);
  CHECK_THROWS_AS(run_trial(plan, 1, 0, std::vector<int>{0}), std::invalid_argument);
  CHECK_THROWS_AS(run_trial(plan, 1, 0, std::vector<int>{11}), std::invalid_argument);
  CHECK_THROWS_AS(run_trial(plan, 1, 0, std::vector<int>{5, 5}), std::invalid_argument);
  CHECK_THROWS_AS(run_batch(plan, 0, 1, {}), std::invalid_argument);
}
