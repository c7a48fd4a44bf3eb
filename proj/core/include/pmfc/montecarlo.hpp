#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pmfc/channel.hpp"
#include "pmfc/decoder.hpp"
#include "pmfc/encoder.hpp"

namespace pmfc {

/// Configuration of one coding scheme at desk scale.
struct SchemeConfig {
  Scheme scheme = Scheme::point_to_point;
  int num_users = 1;
  std::vector<double> powers;        // per user
  double noise_variance = 1.0;
  std::vector<double> target_error;  // per user, sets the terminal intervals
  bool forced = true;                // apply the limit-cycle forcing

  void validate() const;  // throws std::invalid_argument
  PowerProfile profile() const;
  bool operator==(const SchemeConfig&) const = default;
};

/// One step of the deterministic, message-independent schedule shared by the
/// transmitters and the receiver.
struct StepPlan {
  std::vector<double> alpha;         // sign vector
  std::vector<Coefficients> coef;    // per user
  std::vector<double> kernel_slope;  // per user
  std::vector<double> symbol_power;  // var(X_n) per user
  std::vector<double> next_power;    // var(X_{n+1}) per user
  double inject_variance = 0.0;      // receiver-side injection drawn this step
  double effective_noise = 1.0;      // channel noise + injected variance
  double rho = 0.0;                  // two-user state (diagnostic)
  double lambda = 0.0;               // symmetric leading eigenvalue (diagnostic)
  std::vector<double> eigen_cycle;   // symmetric eigenvalue state (empty otherwise)
};

/// Full precomputed schedule for one (config, horizon) pair.
struct SchemePlan {
  SchemeConfig config;
  int horizon = 0;
  std::vector<StepPlan> steps;
  std::vector<double> initial_power;       // var(X_1) per user
  std::vector<TerminalInterval> terminal;  // per user
  double sigma_w2 = 0.0;                   // two-user forced injection variance
  std::vector<double> forcing_power;       // symmetric forced powers (may be empty)
};

/// Builds the schedule by running the correlation-state recursions once.
/// Throws on invalid configuration; horizon is capped at 10^4.
///
/// Forced symmetric schemes use the validated invariant eigenvalue vector
/// once the transient ends: the exact recursion is periodic there, and
/// re-iterating it in floating point amplifies rounding exponentially (by
/// the cycle ratio per step).
SchemePlan build_plan(const SchemeConfig& config, int horizon);

/// Normalized covariance of the matched symbols at one step, reconstructed
/// from the plan's state (the two-user correlation, or the eigenvalue state
/// on the Hadamard columns).
SquareMatrix correlation_matrix(const SchemePlan& plan, int step);

struct StepTrace {
  int step = 0;
  int user = 0;
  double y = 0.0;
  double gain = 0.0;
  double residual_var = 0.0;
  double symbol = 0.0;  // matched symbol transmitted this step (before the sign)
  double log_width = 0.0;
  double rate_bits = 0.0;
};

struct TrialResult {
  std::vector<std::vector<bool>> message_success;   // [checkpoint][user]
  std::vector<std::vector<bool>> terminal_success;  // [checkpoint][user]
  std::vector<double> rate_bits;  // per user, at the horizon
  std::vector<double> log_width;  // per user, natural log, at the horizon
  std::vector<StepTrace> trace;   // filled when requested
};

struct TrialOptions {
  bool record_trace = false;
  /// Test hook: forces every channel-noise and injection draw to zero while
  /// leaving the coefficient schedule untouched.
  bool zero_noise = false;
};

/// Runs one full encode -> channel -> feedback -> decode loop. Deterministic
/// in (plan, seed, trial_index). Checkpoints must be increasing step indices
/// within [1, horizon]; an empty span means {horizon}.
TrialResult run_trial(const SchemePlan& plan, std::uint64_t seed, std::uint64_t trial_index,
                      std::span<const int> checkpoints = {}, const TrialOptions& options = {});

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for an error proportion at normal quantile z.
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z);

struct ErrorEstimate {
  std::uint64_t errors = 0;
  double rate = 0.0;
  WilsonInterval wilson;  // 95% by default
};

/// Order-independent aggregate over a batch of trials.
struct BatchStats {
  std::uint64_t trials = 0;
  std::vector<int> checkpoints;
  std::vector<std::vector<ErrorEstimate>> error;  // [checkpoint][user], message-space
  std::vector<std::vector<double>> symbol_mean;   // [step][user]
  std::vector<std::vector<double>> symbol_var;    // [step][user]
  std::vector<std::vector<double>> symbol_power;  // [step][user], mean of x^2
  std::vector<std::pair<int, int>> pairs;         // user pairs (m < k)
  std::vector<std::vector<double>> pair_corr;     // [step][pair]
  std::vector<double> time_avg_power;             // per user
  std::vector<double> time_avg_power_se;          // standard error of the above
  std::vector<double> mean_rate_bits;             // per user at the horizon
  std::uint64_t equivalence_mismatches = 0;       // message vs terminal disagreements
};

/// Runs `trials` independent trials with streams keyed by (seed, index).
/// Aggregation is chunked in a fixed order, so the result is bit-identical
/// for any thread count. threads == 0 uses the hardware concurrency.
BatchStats run_batch(const SchemePlan& plan, std::uint64_t trials, std::uint64_t seed,
                     std::span<const int> checkpoints = {}, int threads = 0);

struct PowerCheck {
  std::vector<std::vector<bool>> per_step_in_band;  // [step][user]
  std::vector<bool> time_avg_in_band;               // per user
  bool per_step_ok = false;
  bool time_avg_ok = false;
  /// The budget verdict: constant-power schemes must hold the per-step band
  /// at every step; the power-forced scheme is held to its time average.
  bool all_ok = false;
};

/// Compares empirical powers against the plan's scheduled powers with 3-sigma
/// bands: per step, and as a time average over the horizon.
PowerCheck verify_power_constraint(const BatchStats& stats, const SchemePlan& plan);

/// Noise-free decoded-width trajectory: element [user][n-1] is the achieved
/// rate -log2|interval|/n after n steps. Pure arithmetic on the deterministic
/// slope product; no sampling.
std::vector<std::vector<double>> deterministic_rate_trajectory(const SchemePlan& plan);

}  // namespace pmfc
