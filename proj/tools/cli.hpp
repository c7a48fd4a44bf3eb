#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmfc/montecarlo.hpp"

namespace pmfc::cli {

/// One experiment, as read from a flat key=value config file.
struct ExperimentConfig {
  SchemeConfig scheme;
  int horizon = 50;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::vector<int> checkpoints;  // empty means {horizon}
  int threads = 0;               // 0 means hardware concurrency
  bool trace = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the key=value format ('#' starts a comment). Unknown keys are
/// rejected. Scalar `power` / `target_error` entries broadcast to all users.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical emission; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

/// "%.12g" formatting used for all floating-point result output.
std::string fmt12(double v);
double round12(double v);

/// Fixed points for the configured scheme, as a stable-key-order document.
nlohmann::ordered_json cmd_fixed_point(const ExperimentConfig& config);

/// CSV rows (scheme, user, R_star_bits, sum_rate_bits, contraction_r).
std::string cmd_rates_csv(const ExperimentConfig& config);

struct SimulateOutput {
  nlohmann::ordered_json summary;
  std::string per_step_csv;
  std::string correlations_csv;
  bool ok = false;  // all configured assertions passed
};

/// Runs the batch and evaluates the built-in assertions (target error inside
/// the Wilson band, powers in band, decode equivalence exact).
SimulateOutput cmd_simulate(const ExperimentConfig& config);

/// Per-step CSV of a single traced trial (trial index 0).
std::string cmd_trace_csv(const ExperimentConfig& config);

}  // namespace pmfc::cli
