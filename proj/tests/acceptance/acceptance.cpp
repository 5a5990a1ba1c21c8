// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//   sivo_acceptance --cli <path to sivo> --work <scratch dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "sivo/camera.hpp"
#include "sivo/estimator.hpp"
#include "sivo/infotheory.hpp"
#include "sivo/kitti.hpp"
#include "sivo/scenario.hpp"
#include "sivo/selection.hpp"
#include "sivo/sim.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sivo;
using sivo::testing::kitti_rig;
using sivo::testing::random_matrix;
using sivo::testing::random_normal;
using sivo::testing::random_pose;
using sivo::testing::random_spd;
using sivo::testing::synthetic_candidate;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// MI as H(a) - H(a|b), conditional covariance by Schur complement, LU determinants.
double schur_mi(const Eigen::MatrixXd& s, Eigen::Index split) {
  const Eigen::Index m = s.rows() - split;
  const Eigen::MatrixXd saa = s.topLeftCorner(split, split);
  const Eigen::MatrixXd sab = s.topRightCorner(split, m);
  const Eigen::MatrixXd cond = saa - sab * s.bottomRightCorner(m, m).inverse() * sab.transpose();
  const auto h = [](const Eigen::MatrixXd& c) {
    return 0.5 * std::log2(std::pow(2.0 * std::numbers::pi * std::numbers::e,
                                    static_cast<double>(c.rows())) *
                           c.determinant());
  };
  return h(saa) - h(cond);
}

// Point inside the image at a random depth, expressed in the world frame.
Vector3d in_frustum_point(const CameraRig& rig, const Pose3& pose, std::mt19937_64& rng,
                          double zmin = 1.0, double zmax = 60.0) {
  std::uniform_real_distribution<double> depth(zmin, zmax), unit(0.05, 0.95);
  const double z = depth(rng);
  const Vector3d p_c((unit(rng) * rig.width - rig.cx) * z / rig.fx,
                     (unit(rng) * rig.height - rig.cy) * z / rig.fy, z);
  return transform_point(inverse(pose), p_c);
}

Outcome information_identities() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(2, 12);
  double worst = 0.0, min_mi = 1e300;
  for (int i = 0; i < 500; ++i) {
    const int n = dim(rng);
    const int split = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const Eigen::MatrixXd s = random_spd(n, rng);
    const double mi = gaussian_mutual_information(s, split);
    worst = std::max(worst, std::abs(mi - schur_mi(s, split)));
    min_mi = std::min(min_mi, mi);
  }
  const double t = seconds_since(start);
  return {worst <= 1e-9 && min_mi >= -1e-12 && t < 5.0,
          fmt("500 SPD, max |diff| %.2e bits (tol 1e-9), min MI %.3g, %.2f s", worst, min_mi, t)};
}

Outcome jacobian_certification() {
  const auto start = Clock::now();
  const CameraRig rig = kitti_rig();
  std::mt19937_64 rng(102);
  const double h = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose3 pose = random_pose(rng, 0.5, 5.0);
    const Vector3d p = in_frustum_point(rig, pose, rng);
    Matrix36d num_pose;
    for (int k = 0; k < 6; ++k) {
      const Twist6 d = h * Twist6::Unit(k);
      num_pose.col(k) = (project_stereo(rig, compose(exp_se3(d), pose), p) -
                         project_stereo(rig, compose(exp_se3(-d), pose), p)) /
                        (2 * h);
    }
    Matrix3d num_point;
    for (int k = 0; k < 3; ++k) {
      const Vector3d d = h * Vector3d::Unit(k);
      num_point.col(k) =
          (project_stereo(rig, pose, p + d) - project_stereo(rig, pose, p - d)) / (2 * h);
    }
    const auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& n) {
      return (a - n).cwiseAbs().maxCoeff() / std::max(1.0, n.cwiseAbs().maxCoeff());
    };
    worst = std::max({worst, rel(jacobian_wrt_pose(rig, pose, p), num_pose),
                      rel(jacobian_wrt_point(rig, pose, p), num_point)});
  }
  const double t = seconds_since(start);
  return {worst < 1e-5 && t < 5.0,
          fmt("1000 configs, max relative error %.2e (tol 1e-5), %.2f s", worst, t)};
}

Outcome estimator_selector_coupling() {
  const CameraRig rig = kitti_rig();
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Pose3 pose = random_pose(rng, 0.3, 2.0);
    const PoseBelief b{pose, random_spd(6, rng) * 1e-4};
    StereoMeasurement m;
    m.landmark = in_frustum_point(rig, pose, rng, 3.0, 30.0);
    m.observation.pixels = project_stereo(rig, pose, m.landmark) + 1e-6 * random_normal(3, rng);

    CandidateFeature c;
    c.landmark.position = m.landmark;
    c.observation = m.observation;
    linearize(c, rig, pose);
    const PoseBelief post = update_single(b, make_stereo_measurement(rig, m));
    const double drop = gaussian_entropy(b.covariance) - gaussian_entropy(post.covariance);
    worst = std::max(worst, std::abs(drop - mutual_information_score(b.covariance, c)));
  }
  return {worst <= 1e-6, fmt("200 cases, max |entropy drop - MI| %.2e bits (tol 1e-6)", worst)};
}

Outcome reduction_to_prior_art() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> scale(0.05, 3.0);
  std::size_t mismatches = 0, decisions = 0, kept = 0;
  for (int f = 0; f < 100; ++f) {
    PoseBelief b;
    b.covariance = random_spd(6, rng, 0.05) * 0.05;
    std::vector<CandidateFeature> cs;
    for (std::size_t i = 0; i < 25; ++i) {
      const Matrix36d j = scale(rng) * random_matrix(3, 6, rng);
      cs.push_back(synthetic_candidate(i, j, random_spd(3, rng, 0.5) * 0.5));
    }
    SelectionConfig sivo_cfg, mi_cfg;
    mi_cfg.strategy = Strategy::MiOnly;
    const auto a = select_batch(b, cs, sivo_cfg);
    const auto m = select_batch(b, cs, mi_cfg);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      // Independent reference: MI of the hand-built (pose, z_i) joint.
      Eigen::MatrixXd joint(9, 9);
      joint << b.covariance, b.covariance * cs[i].jacobian.transpose(),
          cs[i].jacobian * b.covariance,
          cs[i].jacobian * b.covariance * cs[i].jacobian.transpose() + cs[i].noise();
      const bool reference = schur_mi(joint, 6) >= sivo_cfg.threshold_bits;
      mismatches += (a[i].selected != m[i].selected) || (a[i].selected != reference);
      ++decisions;
      kept += a[i].selected;
    }
  }
  return {mismatches == 0 && kept > 0 && kept < decisions,
          fmt("100 fixtures, %zu decisions, %zu selected, %zu mismatches", decisions, kept,
              mismatches)};
}

struct PairedRuns {
  SequenceResult all;
  SequenceResult sivo;
  double seconds = 0.0;
};

PairedRuns default_pair() {
  const auto start = Clock::now();
  const Scenario s = default_scenario();
  const auto world = generate_world(s.world, s.selection.taxonomy);
  const auto truth = generate_trajectory(s.trajectory);
  PairedRuns r;
  SelectionConfig sel = s.selection;
  sel.strategy = Strategy::AllFeatures;
  r.all = run_sequence(world, truth, s.rig, sel, s.estimator, s.dropout, s.observation, s.seed);
  sel.strategy = Strategy::KaessBatch;
  r.sivo = run_sequence(world, truth, s.rig, sel, s.estimator, s.dropout, s.observation, s.seed);
  r.seconds = seconds_since(start);
  return r;
}

Outcome taxonomy_constraint(const PairedRuns& runs) {
  const Taxonomy& tax = Taxonomy::street15();
  std::size_t dynamic_argmax = 0, dynamic_truth_seen = 0;
  for (const auto& [id, mp] : runs.sivo.map_points) {
    dynamic_argmax += !tax.is_static(mp.argmax_class);
  }
  for (const auto& f : runs.sivo.frames) {
    for (const auto& sc : f.scores) dynamic_truth_seen += sc.reason == RejectionReason::DynamicClass;
  }
  const Scenario s = default_scenario();
  const bool setup = s.trajectory.frames == 500 && s.world.dynamic_fraction &&
                     *s.world.dynamic_fraction == 0.3;
  return {setup && dynamic_argmax == 0 && dynamic_truth_seen > 0,
          fmt("%zu frames, %zu map points, %zu dynamic-argmax in registry, %zu dynamic "
              "rejections",
              runs.sivo.frames.size(), runs.sivo.map_points.size(), dynamic_argmax,
              dynamic_truth_seen)};
}

Outcome table_analog(const PairedRuns& runs) {
  const double base_err = runs.all.final_translation_error();
  const double sivo_err = runs.sivo.final_translation_error();
  const double reduction = map_reduction(runs.all.map_points.size(), runs.sivo.map_points.size());
  double entropy = 0.0;
  std::size_t n = 0;
  for (const auto& f : runs.sivo.frames) {
    for (const auto& sc : f.scores) {
      entropy += sc.classification_entropy_bits;
      ++n;
    }
  }
  entropy /= static_cast<double>(std::max<std::size_t>(n, 1));
  const bool pass = reduction >= 50.0 && sivo_err <= 2.0 * base_err &&
                    std::abs(entropy - 1.0) <= 0.1 && runs.seconds < 60.0;
  return {pass, fmt("reduction %.1f%% (>= 50), error %.4f m vs %.4f m (ratio %.2f, <= 2), "
                    "mean entropy %.3f bits (1 +/- 0.1), %.1f s",
                    reduction, sivo_err, base_err, sivo_err / base_err, entropy, runs.seconds)};
}

TrajectoryRecord straight(double length, std::size_t frames) {
  TrajectoryConfig cfg;
  cfg.shape = TrajectoryShape::StraightLine;
  cfg.length = length;
  cfg.frames = frames;
  return TrajectoryRecord::from_camera_poses(generate_trajectory(cfg));
}

TrajectoryRecord transformed(TrajectoryRecord r, const Pose3& g) {
  for (auto& e : r.entries) e.world_from_camera = compose(g, e.world_from_camera);
  return r;
}

Outcome metric_oracle() {
  TrajectoryConfig loop;
  loop.length = 900.0;
  loop.frames = 901;
  const TrajectoryRecord gt = TrajectoryRecord::from_camera_poses(generate_trajectory(loop));
  const ErrorReport same = kitti_errors(gt, gt);
  const bool zero = same.translation_error_percent == 0.0 && same.rotation_error_deg_per_m == 0.0;

  std::mt19937_64 rng(107);
  TrajectoryRecord est = gt;
  for (auto& e : est.entries) {
    Twist6 d = 0.05 * random_normal(6, rng);
    d.tail<3>() *= 0.01;
    e.world_from_camera = compose(e.world_from_camera, exp_se3(d));
  }
  const ErrorReport base = kitti_errors(gt, est);
  const Pose3 g = random_pose(rng, 1.0, 100.0);
  const ErrorReport moved = kitti_errors(transformed(gt, g), transformed(est, g));
  const ErrorReport est_only = kitti_errors(gt, transformed(est, g));
  const double dt = std::max(
      std::abs(*moved.translation_error_percent - *base.translation_error_percent),
      std::abs(*est_only.translation_error_percent - *base.translation_error_percent));
  const double dr = std::max(
      std::abs(*moved.rotation_error_deg_per_m - *base.rotation_error_deg_per_m),
      std::abs(*est_only.rotation_error_deg_per_m - *base.rotation_error_deg_per_m));
  const bool invariant = dt < 1e-9 && dr < 1e-6;

  const TrajectoryRecord line = straight(900.0, 901);
  TrajectoryRecord inflated = line;
  for (auto& e : inflated.entries) e.world_from_camera.translation *= 1.01;
  const double pct = *kitti_errors(line, inflated).translation_error_percent;
  const bool scale = std::abs(pct - 1.0) <= 0.05;

  return {zero && invariant && scale,
          fmt("identical %s, rigid-transform drift %.1e %% / %.1e deg/m, 1%% scale -> %.4f%% "
              "(1 +/- 0.05)",
              zero ? "0/0" : "nonzero", dt, dr, pct)};
}

Outcome reduction_arithmetic() {
  struct Cell {
    std::size_t baseline, test;
    double expected;
  };
  const Cell cells[] = {{138153, 45875, 66.79}, {64442, 18893, 70.68}, {202293, 58894, 70.89}};
  bool pass = true;
  std::string detail;
  for (const Cell& c : cells) {
    const double r = map_reduction(c.baseline, c.test);
    pass = pass && std::abs(r - c.expected) <= 0.01;
    detail += fmt("%zu/%zu -> %.4f (%.2f) ", c.baseline, c.test, r, c.expected);
  }
  return {pass, detail};
}

Outcome nested_selection() {
  const Scenario sc = default_scenario();
  const auto world = generate_world(sc.world, sc.selection.taxonomy);
  const auto truth = generate_trajectory(sc.trajectory);
  // The densest of a few evenly spaced frames.
  std::size_t frame = 0;
  std::vector<CandidateFeature> cs;
  for (std::size_t f = 0; f < truth.size(); f += 50) {
    auto seen = observe_frame(world, sc.rig, truth[f], sc.observation, sc.seed, f);
    if (seen.size() > cs.size()) {
      cs = std::move(seen);
      frame = f;
    }
  }
  for (auto& c : cs) c.semantics = simulate_mc_samples(c.landmark, sc.dropout, sc.seed, frame);
  const PoseBelief b{truth[frame], sc.estimator.initial_covariance + sc.estimator.process_noise};

  SelectionConfig cfg = sc.selection;
  std::set<LandmarkId> previous;
  bool first = true, nested = true;
  std::string counts;
  std::size_t last = 0;
  for (double h : {1.0, 2.0, 3.0, 4.0}) {
    cfg.threshold_bits = h;
    std::set<LandmarkId> chosen;
    for (const auto& s : select_batch(b, cs, cfg)) {
      if (s.selected) chosen.insert(s.candidate_id);
    }
    if (!first) {
      for (LandmarkId id : chosen) nested = nested && previous.count(id);
      nested = nested && chosen.size() <= last;
    }
    counts += fmt("%g:%zu ", h, chosen.size());
    previous = std::move(chosen);
    last = previous.size();
    first = false;
  }
  return {nested && cs.size() > 0,
          fmt("frame %zu, %zu candidates, selected per threshold %s", frame, cs.size(),
              counts.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const auto invoke = [&](const std::string& name) {
    const std::string cmd = "\"" + cli + "\" simulate --strategy sivo --threshold-bits 2 " +
                            "--mc-samples 6 --seed 7 --out \"" + (work / name).string() +
                            "\" > \"" + (work / (name + ".log")).string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  if (invoke("a") != 0 || invoke("b") != 0) return {false, "simulate exited nonzero"};
  std::size_t compared = 0, differing = 0;
  for (const char* f : {"ground_truth.txt", "BS6E2/trajectory.txt", "BS6E2/selection_report.csv"}) {
    const std::string a = slurp(work / "a" / f);
    differing += a.empty() || a != slurp(work / "b" / f);
    ++compared;
  }
  return {differing == 0, fmt("%zu files compared, %zu differ", compared, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  fs::path work = fs::temp_directory_path() / "sivo_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") {
      cli = argv[i + 1];
    } else if (flag == "--work") {
      work = argv[i + 1];
    } else {
      std::cerr << "usage: sivo_acceptance --cli <sivo> [--work <dir>]\n";
      return 2;
    }
  }
  if (cli.empty()) {
    std::cerr << "usage: sivo_acceptance --cli <sivo> [--work <dir>]\n";
    return 2;
  }

  int failed = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "AC" << id << " " << name << ": "
              << o.detail << std::endl;
  };

  report(1, "information identities", information_identities);
  report(2, "jacobian certification", jacobian_certification);
  report(3, "estimator-selector coupling", estimator_selector_coupling);
  report(4, "reduction to MI-only selection", reduction_to_prior_art);
  PairedRuns runs;
  bool have_runs = false;
  const auto paired = [&]() -> const PairedRuns& {
    if (!have_runs) {
      runs = default_pair();
      have_runs = true;
    }
    return runs;
  };
  report(5, "dynamic classes never mapped", [&] { return taxonomy_constraint(paired()); });
  report(6, "desk-scale map reduction", [&] { return table_analog(paired()); });
  report(7, "KITTI metric oracle", metric_oracle);
  report(8, "map-reduction arithmetic", reduction_arithmetic);
  report(9, "nested selection", nested_selection);
  report(10, "determinism", [&] { return determinism(cli, work); });

  std::cout << (failed == 0 ? "all 10 criteria passed" : std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
