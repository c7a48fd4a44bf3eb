// Acceptance suite: end-to-end checks of the solver constants, the rate
// formulas, and the simulated error statistics, one printed line per
// criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pmfc/fixedpoint.hpp"
#include "pmfc/hadamard.hpp"
#include "pmfc/montecarlo.hpp"
#include "pmfc/numerics.hpp"
#include "pmfc/rates.hpp"

using namespace pmfc;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

constexpr std::uint64_t kBatchTrials = 100000;
constexpr std::uint64_t kSeed = 20240811;
constexpr double kTargetError = 0.0455;  // terminal interval at 2 standard deviations

SchemeConfig point_to_point_config() {
  return {Scheme::point_to_point, 1, {1.0}, 1.0, {kTargetError}, true};
}
SchemeConfig two_user_config() {
  return {Scheme::two_user, 2, {1.0, 1.0}, 1.0, {kTargetError, kTargetError}, true};
}
SchemeConfig symmetric_config(int m) {
  return {Scheme::symmetric, m, std::vector<double>(m, 1.0), 1.0,
          std::vector<double>(m, kTargetError), true};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria;

  // ---------------------------------------------------------------- 1
  {
    Criterion c{1, "fixed points solve their defining equations"};
    const double rho_star = ozarow_rho_star(1.0, 1.0);
    c.require(std::abs(ozarow_residual(rho_star, 1.0, 1.0)) <= 1e-10,
              "two-user residual " + fmt(ozarow_residual(rho_star, 1.0, 1.0)));
    auto cubic = [](double r) { return r * r * r - r * r - 3.0 * r + 1.0; };
    const double cubic_root = bisect(cubic, Bracket(0.0, 1.0, 1e-14));
    c.require(std::abs(rho_star - cubic_root) <= 1e-9,
              "cubic oracle gap " + fmt(rho_star - cubic_root));
    const double lambda2 = kramer_lambda_star(1.0, 2);
    c.require(std::abs(lambda2 - (1.0 + rho_star)) <= 1e-9,
              "lambda*(2) vs 1+rho* gap " + fmt(lambda2 - 1.0 - rho_star));
    const double lambda4 = kramer_lambda_star(1.0, 4);
    c.require(std::abs(kramer_residual(lambda4, 1.0, 4)) <= 1e-10,
              "lambda*(4) residual " + fmt(kramer_residual(lambda4, 1.0, 4)));
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 2
  {
    Criterion c{2, "rate formulas agree across routes"};
    const double rho_star = ozarow_rho_star(1.0, 1.0);
    const RatePrediction two = ozarow_rates(rho_star, 1.0, 1.0);
    const double coupled = ozarow_sum_rate_bits(rho_star, 1.0, 1.0);
    c.require(std::abs(two.sum_rate_bits - coupled) <= 1e-9,
              "two-user sum gap " + fmt(two.sum_rate_bits - coupled));
    for (int m : {1, 2, 4, 8}) {
      for (double p : {0.5, 1.0, 4.0}) {
        const double lambda = kramer_lambda_star(p, m);
        const RatePrediction pred = symmetric_rates(lambda, p, m);
        const double sum = symmetric_sum_rate_bits(lambda, p, m);
        c.require(std::abs(pred.sum_rate_bits - sum) <= 1e-9,
                  "M=" + std::to_string(m) + " P=" + fmt(p) + " gap " +
                      fmt(pred.sum_rate_bits - sum));
      }
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 3
  {
    Criterion c{3, "single user at unit power recovers half a bit"};
    const RatePrediction pred = symmetric_rates(kramer_lambda_star(1.0, 1), 1.0, 1);
    c.require(pred.rate_bits[0] == 0.5, "R* = " + fmt(pred.rate_bits[0]));
    criteria.push_back(c);
  }

  // Shared batches for criteria 4, 7, 8.
  const std::vector<int> horizons{5, 20, 50};
  struct BatchRun {
    std::string name;
    SchemePlan plan;
    BatchStats stats;
  };
  std::vector<BatchRun> runs;
  for (const auto& [name, config] :
       std::vector<std::pair<std::string, SchemeConfig>>{
           {"point_to_point", point_to_point_config()},
           {"two_user", two_user_config()},
           {"symmetric_4", symmetric_config(4)}}) {
    BatchRun run;
    run.name = name;
    run.plan = build_plan(config, 50);
    run.stats = run_batch(run.plan, kBatchTrials, kSeed, horizons);
    runs.push_back(std::move(run));
  }

  // ---------------------------------------------------------------- 4
  {
    Criterion c{4, "empirical error matches the exact tail value at every horizon"};
    for (const BatchRun& run : runs) {
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        for (int u = 0; u < run.plan.config.num_users; ++u) {
          const ErrorEstimate& e = run.stats.error[h][u];
          const bool inside = e.wilson.lo <= kTargetError && kTargetError <= e.wilson.hi;
          c.require(inside, run.name + " n=" + std::to_string(horizons[h]) + " user " +
                                std::to_string(u + 1) + " rate " + fmt(e.rate) + " band [" +
                                fmt(e.wilson.lo) + "," + fmt(e.wilson.hi) + "]");
        }
      }
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 5
  {
    Criterion c{5, "deterministic decoded-width rate is within 0.01 bits of R* at n=200"};
    for (const auto& [name, config] :
         std::vector<std::pair<std::string, SchemeConfig>>{
             {"point_to_point", point_to_point_config()},
             {"two_user", two_user_config()},
             {"symmetric_4", symmetric_config(4)}}) {
      const SchemePlan plan = build_plan(config, 200);
      const auto trajectory = deterministic_rate_trajectory(plan);
      std::vector<double> predicted;
      if (config.scheme == Scheme::two_user) {
        predicted = ozarow_rates(ozarow_rho_star(1.0, 1.0), 1.0, 1.0).rate_bits;
      } else {
        predicted =
            symmetric_rates(kramer_lambda_star(1.0, config.num_users), 1.0, config.num_users)
                .rate_bits;
      }
      for (int u = 0; u < config.num_users; ++u) {
        const double gap = trajectory[u][199] - predicted[u];
        c.require(std::abs(gap) <= 0.01,
                  name + " user " + std::to_string(u + 1) + " gap " + fmt(gap));
      }
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 6
  {
    Criterion c{6, "state law: correlation trace and Hadamard eigenvector preservation"};
    const SchemePlan plan = build_plan(two_user_config(), 20);
    const double rho_star = ozarow_rho_star(1.0, 1.0);
    for (int n = 2; n <= 20; ++n) {
      const double expected = (n % 2 == 0 ? -1.0 : 1.0) * rho_star;
      c.require(std::abs(plan.steps[n - 1].rho - expected) <= 1e-10,
                "rho_" + std::to_string(n) + " off the alternating cycle");
    }
    const std::uint64_t trials = 10000;
    const BatchStats stats = run_batch(plan, trials, kSeed + 1, {});
    const double band = 3.0 / std::sqrt(static_cast<double>(trials));
    double worst = 0.0;
    for (int n = 0; n < 20; ++n) {
      worst = std::max(worst, std::abs(stats.pair_corr[n][0] - plan.steps[n].rho));
    }
    c.require(worst < band, "max corr deviation " + fmt(worst) + " vs band " + fmt(band));

    for (int m : {4, 8}) {
      // The deterministic state at every step n <= 50 must keep the Hadamard
      // columns as eigenvectors of the correlation matrix.
      const SchemePlan splan = build_plan(symmetric_config(m), 50);
      const HadamardMatrix hadamard = HadamardMatrix::of_order(m);
      double worst_eigen = 0.0;
      for (int n = 1; n <= 50; ++n) {
        const SquareMatrix corr = correlation_matrix(splan, n);
        for (int j = 0; j < m; ++j) {
          const std::vector<double> h = hadamard.column(j);
          const int pos = ((j - (n - 1)) % m + m) % m;
          for (int i = 0; i < m; ++i) {
            double dot = 0.0;
            for (int k = 0; k < m; ++k) dot += corr(i, k) * h[k];
            worst_eigen =
                std::max(worst_eigen, std::abs(dot - splan.steps[n - 1].eigen_cycle[pos] * h[i]));
          }
        }
      }
      c.require(worst_eigen <= 1e-9,
                "M=" + std::to_string(m) + " eigenvector residual " + fmt(worst_eigen));

      // The state law behind that schedule: raw iteration through the forced
      // transient plus one full period returns to the invariant vector.
      const SymmetricFixedPoint fp = forcing_powers(1.0, m);
      std::vector<double> cycle(m, 1.0);
      for (int n = 1; n < m; ++n) cycle = symmetric_lambda_step(cycle, fp.forcing_powers[n - 1], m);
      for (int n = 0; n < m; ++n) cycle = symmetric_lambda_step(cycle, 1.0, m);
      double worst_cycle = 0.0;
      for (int k = 0; k < m; ++k) {
        worst_cycle = std::max(worst_cycle, std::abs(cycle[k] - fp.eigen_cycle[k]));
      }
      c.require(worst_cycle <= 1e-9,
                "M=" + std::to_string(m) + " period-map residual " + fmt(worst_cycle));
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 7
  {
    Criterion c{7, "message-space success equals terminal membership in every trial"};
    for (const BatchRun& run : runs) {
      c.require(run.stats.equivalence_mismatches == 0,
                run.name + " mismatches " + std::to_string(run.stats.equivalence_mismatches));
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 8
  {
    Criterion c{8,
                "constant-power schemes hold the 3-sigma band per step; the forced scheme "
                "meets it on time average"};
    for (const BatchRun& run : runs) {
      const PowerCheck power = verify_power_constraint(run.stats, run.plan);
      if (run.plan.forcing_power.empty()) {
        int step_violations = 0;
        for (const auto& step : power.per_step_in_band) {
          for (const bool ok : step) step_violations += ok ? 0 : 1;
        }
        c.require(step_violations == 0,
                  run.name + " " + std::to_string(step_violations) + " per-step violations");
      }
      for (int u = 0; u < run.plan.config.num_users; ++u) {
        c.require(power.time_avg_in_band[u],
                  run.name + " user " + std::to_string(u + 1) + " time-average off band");
        c.require(run.stats.time_avg_power[u] <=
                      run.plan.config.powers[u] + 3.0 * run.stats.time_avg_power_se[u],
                  run.name + " user " + std::to_string(u + 1) + " exceeds the power budget");
      }
    }
    criteria.push_back(c);
  }

  // ---------------------------------------------------------------- 9
  {
    Criterion c{9,
                "double-exponential decay is covered by the exact tail value (4) and the "
                "geometric width decay (5), not by rare-event counting"};
    c.require(criteria[3].pass && criteria[4].pass, "criteria 4 and 5 must pass");
    criteria.push_back(c);
  }

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (c.pass) {
      std::printf("PASS  criterion %d: %s\n", c.id, c.label.c_str());
    } else {
      ++failures;
      std::printf("FAIL  criterion %d: %s (%s)\n", c.id, c.label.c_str(), c.detail.c_str());
    }
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
