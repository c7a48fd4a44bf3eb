#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertionFailure = 1;
constexpr int kExitConfigError = 2;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
};

pmfc::cli::ExperimentConfig load(const CommonArgs& args) {
  pmfc::cli::ExperimentConfig config = pmfc::cli::parse_config_file(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.threads) config.threads = *args.threads;
  return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--threads", args.threads, "worker threads (default: hardware)");
  cmd->add_option("--out", args.out_dir, "directory for output files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posterior-matching feedback coding toolkit for the AWGN multiple-access channel"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* fixed_point = app.add_subcommand("fixed-point", "solve the scheme fixed points");
  CLI::App* rates = app.add_subcommand("rates", "closed-form rate predictions as CSV");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo batch with assertions");
  CLI::App* trace = app.add_subcommand("trace", "per-step CSV of one trial");
  for (CLI::App* cmd : {fixed_point, rates, simulate, trace}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const pmfc::cli::ExperimentConfig config = load(args);
    const bool have_out = !args.out_dir.empty();
    std::filesystem::path out_dir;
    if (have_out) {
      out_dir = args.out_dir;
      std::filesystem::create_directories(out_dir);
    }

    if (fixed_point->parsed()) {
      const auto doc = pmfc::cli::cmd_fixed_point(config);
      const std::string text = doc.dump(2) + "\n";
      std::cout << text;
      if (have_out) write_file(out_dir / "fixed_point.json", text);
      return kExitOk;
    }
    if (rates->parsed()) {
      const std::string csv = pmfc::cli::cmd_rates_csv(config);
      std::cout << csv;
      if (have_out) write_file(out_dir / "rates.csv", csv);
      return kExitOk;
    }
    if (simulate->parsed()) {
      const auto result = pmfc::cli::cmd_simulate(config);
      const std::string summary = result.summary.dump(2) + "\n";
      std::cout << summary;
      if (have_out) {
        write_file(out_dir / "summary.json", summary);
        write_file(out_dir / "per_step.csv", result.per_step_csv);
        write_file(out_dir / "correlations.csv", result.correlations_csv);
      }
      return result.ok ? kExitOk : kExitAssertionFailure;
    }
    if (trace->parsed()) {
      const std::string csv = pmfc::cli::cmd_trace_csv(config);
      if (have_out) {
        write_file(out_dir / "trace.csv", csv);
      } else {
        std::cout << csv;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
