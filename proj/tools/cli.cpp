#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pmfc/fixedpoint.hpp"
#include "pmfc/rates.hpp"

namespace pmfc::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad boolean value for '" + key + "': " + value);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::point_to_point: return "point_to_point";
    case Scheme::two_user: return "two_user";
    case Scheme::symmetric: return "symmetric";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "point_to_point") return Scheme::point_to_point;
  if (name == "two_user") return Scheme::two_user;
  if (name == "symmetric") return Scheme::symmetric;
  throw std::invalid_argument("config: unknown scheme '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: empty key or value on line " + std::to_string(lineno));
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
  }

  ExperimentConfig config;
  std::vector<double> powers;
  std::vector<double> targets;
  for (const auto& [key, value] : kv) {
    if (key == "scheme") {
      config.scheme.scheme = scheme_from_name(value);
    } else if (key == "num_users") {
      config.scheme.num_users = static_cast<int>(parse_int(key, value));
    } else if (key == "power" || key == "powers") {
      for (const auto& item : split_csv(value)) powers.push_back(parse_double(key, item));
    } else if (key == "noise_variance") {
      config.scheme.noise_variance = parse_double(key, value);
    } else if (key == "target_error") {
      for (const auto& item : split_csv(value)) targets.push_back(parse_double(key, item));
    } else if (key == "forced") {
      config.scheme.forced = parse_bool(key, value);
    } else if (key == "horizon") {
      config.horizon = static_cast<int>(parse_int(key, value));
    } else if (key == "trials") {
      config.trials = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "checkpoints") {
      for (const auto& item : split_csv(value)) {
        config.checkpoints.push_back(static_cast<int>(parse_int(key, item)));
      }
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "trace") {
      config.trace = parse_bool(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  const int m = config.scheme.num_users;
  if (powers.empty()) powers.push_back(1.0);
  if (targets.empty()) targets.push_back(0.0455);
  if (static_cast<int>(powers.size()) == 1 && m > 1) powers.assign(m, powers.front());
  if (static_cast<int>(targets.size()) == 1 && m > 1) targets.assign(m, targets.front());
  config.scheme.powers = std::move(powers);
  config.scheme.target_error = std::move(targets);
  return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::string emit_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "scheme = " << scheme_name(config.scheme.scheme) << "\n";
  out << "num_users = " << config.scheme.num_users << "\n";
  out << "powers = ";
  for (std::size_t i = 0; i < config.scheme.powers.size(); ++i) {
    out << (i ? "," : "") << fmt17(config.scheme.powers[i]);
  }
  out << "\n";
  out << "noise_variance = " << fmt17(config.scheme.noise_variance) << "\n";
  out << "target_error = ";
  for (std::size_t i = 0; i < config.scheme.target_error.size(); ++i) {
    out << (i ? "," : "") << fmt17(config.scheme.target_error[i]);
  }
  out << "\n";
  out << "forced = " << (config.scheme.forced ? "true" : "false") << "\n";
  out << "horizon = " << config.horizon << "\n";
  out << "trials = " << config.trials << "\n";
  out << "seed = " << config.seed << "\n";
  if (!config.checkpoints.empty()) {
    out << "checkpoints = ";
    for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
      out << (i ? "," : "") << config.checkpoints[i];
    }
    out << "\n";
  }
  if (config.threads != 0) out << "threads = " << config.threads << "\n";
  out << "trace = " << (config.trace ? "true" : "false") << "\n";
  return out.str();
}

nlohmann::ordered_json cmd_fixed_point(const ExperimentConfig& config) {
  config.scheme.validate();
  nlohmann::ordered_json doc;
  doc["scheme"] = scheme_name(config.scheme.scheme);
  if (config.scheme.scheme == Scheme::two_user) {
    const double p1 = config.scheme.powers[0];
    const double p2 = config.scheme.powers[1];
    const TwoUserFixedPoint fp = solve_two_user(p1, p2);
    doc["p1"] = round12(p1);
    doc["p2"] = round12(p2);
    doc["rho_star"] = round12(fp.rho_star);
    doc["rho_star_residual"] = round12(fp.residual);
    doc["sigma_w2"] = round12(fp.sigma_w2);
  } else {
    const int m = config.scheme.num_users;
    const double power = config.scheme.powers.front();
    const SymmetricFixedPoint fp = forcing_powers(power, m);
    doc["num_users"] = m;
    doc["power"] = round12(power);
    doc["lambda_star"] = round12(fp.lambda_star);
    doc["lambda_star_residual"] = round12(fp.residual);
    doc["lambda_star_log_residual"] = round12(fp.log_residual);
    nlohmann::ordered_json cycle = nlohmann::ordered_json::array();
    for (const double l : fp.eigen_cycle) cycle.push_back(round12(l));
    doc["eigenvalue_cycle"] = std::move(cycle);
    nlohmann::ordered_json fpow = nlohmann::ordered_json::array();
    for (const double p : fp.forcing_powers) fpow.push_back(round12(p));
    doc["forcing_powers"] = std::move(fpow);
    doc["sum_rate_bits"] = round12(symmetric_sum_rate_bits(fp.lambda_star, power, m));
  }
  return doc;
}

std::string cmd_rates_csv(const ExperimentConfig& config) {
  config.scheme.validate();
  RatePrediction pred;
  if (config.scheme.scheme == Scheme::two_user) {
    const double rho = ozarow_rho_star(config.scheme.powers[0], config.scheme.powers[1]);
    pred = ozarow_rates(rho, config.scheme.powers[0], config.scheme.powers[1]);
    pred.scheme = Scheme::two_user;
  } else {
    const int m = config.scheme.num_users;
    const double power = config.scheme.powers.front();
    pred = symmetric_rates(kramer_lambda_star(power, m), power, m);
    pred.scheme = config.scheme.scheme;
  }
  std::ostringstream out;
  out << "# pmfc rates v1\n";
  out << "scheme,user,R_star_bits,sum_rate_bits,contraction_r\n";
  for (std::size_t u = 0; u < pred.rate_bits.size(); ++u) {
    out << scheme_name(pred.scheme) << "," << (u + 1) << "," << fmt12(pred.rate_bits[u]) << ","
        << fmt12(pred.sum_rate_bits) << "," << fmt12(pred.contraction[u]) << "\n";
  }
  return out.str();
}

SimulateOutput cmd_simulate(const ExperimentConfig& config) {
  const SchemePlan plan = build_plan(config.scheme, config.horizon);
  const BatchStats stats =
      run_batch(plan, config.trials, config.seed, config.checkpoints, config.threads);
  const PowerCheck power = verify_power_constraint(stats, plan);

  bool error_in_band = true;
  nlohmann::ordered_json users = nlohmann::ordered_json::array();
  for (int u = 0; u < config.scheme.num_users; ++u) {
    nlohmann::ordered_json ju;
    ju["user"] = u + 1;
    ju["target_error"] = round12(config.scheme.target_error[u]);
    nlohmann::ordered_json emp = nlohmann::ordered_json::array();
    nlohmann::ordered_json wlo = nlohmann::ordered_json::array();
    nlohmann::ordered_json whi = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < stats.checkpoints.size(); ++c) {
      const ErrorEstimate& e = stats.error[c][u];
      emp.push_back(round12(e.rate));
      wlo.push_back(round12(e.wilson.lo));
      whi.push_back(round12(e.wilson.hi));
      if (!(e.wilson.lo <= config.scheme.target_error[u] &&
            config.scheme.target_error[u] <= e.wilson.hi)) {
        error_in_band = false;
      }
    }
    ju["empirical_error"] = std::move(emp);
    ju["wilson_lo"] = std::move(wlo);
    ju["wilson_hi"] = std::move(whi);
    ju["mean_rate_bits"] = round12(stats.mean_rate_bits[u]);
    users.push_back(std::move(ju));
  }

  SimulateOutput out;
  out.summary["scheme"] = scheme_name(config.scheme.scheme);
  out.summary["num_users"] = config.scheme.num_users;
  out.summary["trials"] = stats.trials;
  out.summary["horizon"] = config.horizon;
  out.summary["seed"] = config.seed;
  out.summary["checkpoints"] = stats.checkpoints;
  out.summary["per_user"] = std::move(users);
  out.summary["equivalence_mismatches"] = stats.equivalence_mismatches;
  nlohmann::ordered_json checks;
  checks["error_within_wilson"] = error_in_band;
  checks["power_in_band"] = power.all_ok;
  checks["decode_equivalence"] = stats.equivalence_mismatches == 0;
  out.ok = error_in_band && power.all_ok && stats.equivalence_mismatches == 0;
  checks["all"] = out.ok;
  out.summary["checks"] = std::move(checks);

  std::ostringstream per_step;
  per_step << "# pmfc per-step stats v1\n";
  per_step << "n,user,x_mean,x_var,x_power\n";
  for (int n = 0; n < config.horizon; ++n) {
    for (int u = 0; u < config.scheme.num_users; ++u) {
      per_step << (n + 1) << "," << (u + 1) << "," << fmt12(stats.symbol_mean[n][u]) << ","
               << fmt12(stats.symbol_var[n][u]) << "," << fmt12(stats.symbol_power[n][u])
               << "\n";
    }
  }
  out.per_step_csv = per_step.str();

  std::ostringstream corr;
  corr << "# pmfc pair correlations v1\n";
  corr << "n,user_a,user_b,corr\n";
  for (int n = 0; n < config.horizon; ++n) {
    for (std::size_t p = 0; p < stats.pairs.size(); ++p) {
      corr << (n + 1) << "," << (stats.pairs[p].first + 1) << "," << (stats.pairs[p].second + 1)
           << "," << fmt12(stats.pair_corr[n][p]) << "\n";
    }
  }
  out.correlations_csv = corr.str();
  return out;
}

std::string cmd_trace_csv(const ExperimentConfig& config) {
  const SchemePlan plan = build_plan(config.scheme, config.horizon);
  TrialOptions options;
  options.record_trace = true;
  const TrialResult trial = run_trial(plan, config.seed, 0, {}, options);
  std::ostringstream out;
  out << "# pmfc trace v1\n";
  out << "n,user,Y,A,B,X,log_width,rate_bits\n";
  for (const StepTrace& row : trial.trace) {
    out << row.step << "," << (row.user + 1) << "," << fmt12(row.y) << "," << fmt12(row.gain)
        << "," << fmt12(row.residual_var) << "," << fmt12(row.symbol) << ","
        << fmt12(row.log_width) << "," << fmt12(row.rate_bits) << "\n";
  }
  return out.str();
}

}  // namespace pmfc::cli
