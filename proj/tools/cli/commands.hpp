#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sivo/selection.hpp"

namespace sivo::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeFailure = 2 };

struct SimulateArgs {
  std::optional<std::filesystem::path> scenario;  ///< built-in default when absent
  std::optional<std::string> strategy;
  std::optional<double> threshold_bits;
  std::optional<int> mc_samples;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "runs";
  std::vector<std::string> command_line;  ///< recorded in the manifest
};

struct EvaluateArgs {
  std::filesystem::path gt;
  std::filesystem::path est;
  std::optional<std::filesystem::path> baseline_report;
  std::optional<std::filesystem::path> test_report;
  std::optional<std::filesystem::path> out;  ///< JSON report file
  std::size_t stride = 1;
};

struct SweepArgs {
  std::optional<std::filesystem::path> scenario;
  std::vector<double> thresholds;
  std::vector<int> samples;
  std::string strategy = "sivo-batch";
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "sweep";
  std::vector<std::string> command_line;
};

/// Run label: BS{N}E{H} for batch SIVO, with a -greedy suffix for the greedy
/// procedure, MI-E{H} for the class-blind threshold and ALL for the baseline.
std::string run_label(Strategy strategy, int mc_samples, double threshold_bits);

/// Writes <out>/manifest.json, <out>/ground_truth.txt and, per strategy,
/// <out>/<label>/{trajectory.txt,selection_report.csv}.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

/// Prints the error report as JSON on `out` (and to args.out when given).
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

/// Cross product thresholds x samples plus one all-features baseline, all on
/// the same world. Writes <out>/summary.csv and <out>/manifest.json.
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv with subcommands simulate, evaluate and sweep.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sivo::cli
