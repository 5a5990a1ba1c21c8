#include "cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sivo/error.hpp"
#include "sivo/format.hpp"
#include "sivo/kitti.hpp"
#include "sivo/reports.hpp"
#include "sivo/scenario.hpp"
#include "sivo/sim.hpp"

#ifndef SIVO_VERSION
#define SIVO_VERSION "unknown"
#endif

namespace sivo::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

Scenario load_scenario(const std::optional<fs::path>& path) {
  if (!path) return default_scenario();
  return parse_scenario(read_file(*path));
}

void apply_seed(Scenario& s, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  s.seed = *seed;
  s.world.seed = *seed;
}

void set_mc_samples(Scenario& s, int n) {
  if (n < 1) throw ConfigError("--mc-samples must be at least 1");
  s.selection.mc_samples = n;
  s.dropout.samples = n;
}

Json manifest_header(const Scenario& s, std::string_view command,
                     const std::vector<std::string>& command_line) {
  Json j;
  j["tool"] = "sivo";
  j["version"] = SIVO_VERSION;
  j["command"] = command;
  j["command_line"] = command_line;
  j["status"] = "running";
  j["seeds"] = {{"sequence", s.seed}, {"world", s.world.seed}};
  j["scenario"] = Json::parse(scenario_to_json(s));
  return j;
}

void write_manifest(const fs::path& dir, const Json& manifest) {
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

struct RunOutcome {
  std::string label;
  SequenceResult result;
  double seconds = 0.0;
};

// One strategy on a prepared world; writes the per-label artifacts.
RunOutcome run_one(const Scenario& s, const std::vector<Landmark>& world,
                   const std::vector<Pose3>& truth, const fs::path& dir) {
  RunOutcome outcome;
  outcome.label = run_label(s.selection.strategy, s.selection.mc_samples,
                            s.selection.threshold_bits);
  const auto start = Clock::now();
  outcome.result = run_sequence(world, truth, s.rig, s.selection, s.estimator, s.dropout,
                                s.observation, s.seed);
  outcome.seconds = seconds_since(start);
  const fs::path run_dir = dir / outcome.label;
  write_file(run_dir / "trajectory.txt",
             write_kitti_poses(TrajectoryRecord::from_camera_poses(outcome.result.estimated)));
  write_file(run_dir / "selection_report.csv", write_selection_report(outcome.result.frames));
  return outcome;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string csv_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

std::string run_label(Strategy strategy, int mc_samples, double threshold_bits) {
  const std::string h = format_number(threshold_bits);
  switch (strategy) {
    case Strategy::AllFeatures: return "ALL";
    case Strategy::MiOnly: return "MI-E" + h;
    case Strategy::KaessBatch: return "BS" + std::to_string(mc_samples) + "E" + h;
    case Strategy::DavisonGreedy:
      return "BS" + std::to_string(mc_samples) + "E" + h + "-greedy";
  }
  return "unknown";
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario(args.scenario);
    if (args.strategy) s.strategies = {parse_strategy(*args.strategy)};
    if (args.threshold_bits) s.selection.threshold_bits = *args.threshold_bits;
    if (args.mc_samples) set_mc_samples(s, *args.mc_samples);
    apply_seed(s, args.seed);
    s.validate();
  } catch (const std::exception& e) {
    err << "sivo simulate: " << e.what() << "\n";
    return kConfigError;
  }

  Json manifest = manifest_header(s, "simulate", args.command_line);
  Json runs = Json::array();
  int code = kOk;
  try {
    write_manifest(args.out, manifest);
    const auto start = Clock::now();
    const std::vector<Landmark> world = generate_world(s.world, s.selection.taxonomy);
    const std::vector<Pose3> truth = generate_trajectory(s.trajectory);
    write_file(args.out / "ground_truth.txt",
               write_kitti_poses(TrajectoryRecord::from_camera_poses(truth)));

    for (Strategy strategy : s.strategies) {
      Scenario cell = s;
      cell.selection.strategy = strategy;
      Json run;
      run["strategy"] = to_string(strategy);
      try {
        const RunOutcome o = run_one(cell, world, truth, args.out);
        run["label"] = o.label;
        run["status"] = "ok";
        run["map_points"] = o.result.map_points.size();
        run["final_translation_error_m"] = o.result.final_translation_error();
        run["seconds"] = o.seconds;
        run["trajectory"] = (fs::path(o.label) / "trajectory.txt").generic_string();
        run["selection_report"] = (fs::path(o.label) / "selection_report.csv").generic_string();
        out << std::left << std::setw(16) << o.label << " map_points " << std::setw(8)
            << o.result.map_points.size() << " final_error_m "
            << format_number(o.result.final_translation_error()) << "\n";
      } catch (const EstimatorDiverged& e) {
        run["label"] = run_label(strategy, cell.selection.mc_samples,
                                 cell.selection.threshold_bits);
        run["status"] = "diverged";
        run["error"] = e.what();
        err << "sivo simulate: " << run["label"].get<std::string>() << ": " << e.what() << "\n";
        code = kRuntimeFailure;
      }
      runs.push_back(run);
      if (code != kOk) break;
    }
    manifest["ground_truth"] = "ground_truth.txt";
    manifest["runs"] = runs;
    manifest["timings"] = {{"total_seconds", seconds_since(start)}};
    manifest["status"] = code == kOk ? "complete" : "failed";
    write_manifest(args.out, manifest);
  } catch (const std::exception& e) {
    err << "sivo simulate: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return code;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  ErrorReport report;
  try {
    if (args.baseline_report.has_value() != args.test_report.has_value()) {
      throw ConfigError("--baseline-report and --test-report go together");
    }
    KittiErrorOptions options;
    options.stride = args.stride;
    const TrajectoryRecord gt = parse_kitti_poses(read_file(args.gt));
    const TrajectoryRecord est = parse_kitti_poses(read_file(args.est));
    report = kitti_errors(gt, est, options);
    if (args.baseline_report) {
      const std::size_t baseline =
          count_map_points(parse_selection_report(read_file(*args.baseline_report)));
      const std::size_t test =
          count_map_points(parse_selection_report(read_file(*args.test_report)));
      report.map_points_baseline = baseline;
      report.map_points_test = test;
      report.map_reduction_percent = map_reduction(baseline, test);
    }
  } catch (const std::exception& e) {
    err << "sivo evaluate: " << e.what() << "\n";
    return kConfigError;
  }

  const std::string text = to_json(report);
  out << text << "\n";
  if (args.out) {
    try {
      write_file(*args.out, text + "\n");
    } catch (const std::exception& e) {
      err << "sivo evaluate: " << e.what() << "\n";
      return kRuntimeFailure;
    }
  }
  return kOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  Scenario s;
  Strategy strategy{};
  try {
    if (args.thresholds.empty() || args.samples.empty()) {
      throw ConfigError("--thresholds and --samples need at least one value each");
    }
    s = load_scenario(args.scenario);
    strategy = parse_strategy(args.strategy);
    apply_seed(s, args.seed);
    for (int n : args.samples) set_mc_samples(s, n);
    for (double h : args.thresholds) {
      s.selection.threshold_bits = h;
      s.selection.validate();
    }
    s.validate();
  } catch (const std::exception& e) {
    err << "sivo sweep: " << e.what() << "\n";
    return kConfigError;
  }

  Json manifest = manifest_header(s, "sweep", args.command_line);
  manifest["thresholds"] = args.thresholds;
  manifest["samples"] = args.samples;
  manifest["strategy"] = to_string(strategy);
  bool any_failed = false;
  try {
    write_manifest(args.out, manifest);
    const auto start = Clock::now();
    const std::vector<Landmark> world = generate_world(s.world, s.selection.taxonomy);
    const std::vector<Pose3> truth = generate_trajectory(s.trajectory);
    const TrajectoryRecord gt = TrajectoryRecord::from_camera_poses(truth);
    write_file(args.out / "ground_truth.txt", write_kitti_poses(gt));

    Scenario base = s;
    base.selection.strategy = Strategy::AllFeatures;
    set_mc_samples(base, args.samples.front());
    const RunOutcome baseline = run_one(base, world, truth, args.out);
    const ErrorReport base_err =
        kitti_errors(gt, TrajectoryRecord::from_camera_poses(baseline.result.estimated));
    const std::size_t base_points = baseline.result.map_points.size();

    std::ostringstream csv;
    csv << "scenario,baseline_trans_err_pct,baseline_rot_err_deg_per_m,trans_err_pct,"
           "rot_err_deg_per_m,baseline_map_points,map_points,map_reduction_pct,config,status\n";
    Json cells = Json::array();
    for (int n : args.samples) {
      for (double h : args.thresholds) {
        Scenario cell = s;
        cell.selection.strategy = strategy;
        cell.selection.threshold_bits = h;
        set_mc_samples(cell, n);
        const std::string label = run_label(strategy, n, h);
        Json entry{{"label", label}};
        csv << s.name << "," << csv_number(base_err.translation_error_percent) << ","
            << csv_number(base_err.rotation_error_deg_per_m) << ",";
        try {
          const RunOutcome o = run_one(cell, world, truth, args.out);
          const ErrorReport e =
              kitti_errors(gt, TrajectoryRecord::from_camera_poses(o.result.estimated));
          const std::size_t points = o.result.map_points.size();
          const double reduction = map_reduction(base_points, points);
          csv << csv_number(e.translation_error_percent) << ","
              << csv_number(e.rotation_error_deg_per_m) << "," << base_points << "," << points
              << "," << format_number(reduction) << "," << label << ",ok\n";
          entry["status"] = "ok";
          entry["map_points"] = points;
          entry["translation_error_percent"] = optional_number(e.translation_error_percent);
          entry["rotation_error_deg_per_m"] = optional_number(e.rotation_error_deg_per_m);
          entry["seconds"] = o.seconds;
          out << std::left << std::setw(16) << label << " map_points " << std::setw(8) << points
              << " reduction_pct " << format_number(reduction) << "\n";
        } catch (const Error& ex) {
          any_failed = true;
          csv << ",," << base_points << ",,," << label << ",failed\n";
          entry["status"] = "failed";
          entry["error"] = ex.what();
          err << "sivo sweep: " << label << ": " << ex.what() << "\n";
        }
        cells.push_back(entry);
      }
    }
    write_file(args.out / "summary.csv", csv.str());
    manifest["baseline"] = {{"label", baseline.label},
                            {"map_points", base_points},
                            {"translation_error_percent",
                             optional_number(base_err.translation_error_percent)},
                            {"rotation_error_deg_per_m",
                             optional_number(base_err.rotation_error_deg_per_m)},
                            {"seconds", baseline.seconds}};
    manifest["cells"] = cells;
    manifest["summary"] = "summary.csv";
    manifest["timings"] = {{"total_seconds", seconds_since(start)}};
    manifest["status"] = any_failed ? "failed" : "complete";
    write_manifest(args.out, manifest);
  } catch (const std::exception& e) {
    err << "sivo sweep: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return any_failed ? kRuntimeFailure : kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> command_line(argv, argv + argc);

  CLI::App app{"Semantic feature selection for stereo visual odometry", "sivo"};
  app.set_version_flag("--version", std::string(SIVO_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim;
  sim.command_line = command_line;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario for one or more strategies");
  simulate->add_option("--scenario", sim.scenario, "Scenario file (default: built-in loop)");
  simulate->add_option("--strategy", sim.strategy, "all, mi, sivo-batch, sivo-greedy")
      ->check(CLI::IsMember({"all", "mi", "sivo-batch", "sivo-greedy", "sivo"}));
  simulate->add_option("--threshold-bits", sim.threshold_bits, "Selection threshold in bits");
  simulate->add_option("--mc-samples", sim.mc_samples, "MC-dropout samples per feature");
  simulate->add_option("--seed", sim.seed, "Seed for world and sequence");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "KITTI errors and map reduction");
  evaluate->add_option("--gt", eval.gt, "Ground-truth poses (KITTI format)")->required();
  evaluate->add_option("--est", eval.est, "Estimated poses (KITTI format)")->required();
  evaluate->add_option("--baseline-report", eval.baseline_report, "Baseline selection report");
  evaluate->add_option("--test-report", eval.test_report, "Test selection report");
  evaluate->add_option("--stride", eval.stride, "Subsequence start stride")
      ->capture_default_str();
  evaluate->add_option("--out", eval.out, "Also write the JSON report here");

  SweepArgs sweep_args;
  sweep_args.command_line = command_line;
  auto* sweep = app.add_subcommand("sweep", "Threshold x sample-count grid");
  sweep->add_option("--scenario", sweep_args.scenario, "Scenario file (default: built-in loop)");
  sweep->add_option("--thresholds", sweep_args.thresholds, "Thresholds in bits, e.g. 2,3,4")
      ->required()
      ->delimiter(',');
  sweep->add_option("--samples", sweep_args.samples, "Sample counts, e.g. 2,6,12")
      ->required()
      ->delimiter(',');
  sweep->add_option("--strategy", sweep_args.strategy, "sivo-batch, sivo-greedy or mi")
      ->check(CLI::IsMember({"mi", "sivo-batch", "sivo-greedy", "sivo"}))
      ->capture_default_str();
  sweep->add_option("--seed", sweep_args.seed, "Seed for world and sequence");
  sweep->add_option("--out", sweep_args.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  if (simulate->parsed()) return cmd_simulate(sim, out, err);
  if (evaluate->parsed()) return cmd_evaluate(eval, out, err);
  return cmd_sweep(sweep_args, out, err);
}

}  // namespace sivo::cli
