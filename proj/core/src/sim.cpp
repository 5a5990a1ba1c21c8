#include "sivo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "sivo/error.hpp"
#include "sivo/infotheory.hpp"
#include "sivo/random.hpp"

namespace sivo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CurvePoint {
  double x = 0.0;
  double z = 0.0;
  double dx = 0.0;
  double dz = 0.0;
};

// Unscaled curves over theta in [0, 2 pi] (straight line over [0, 1]).
CurvePoint curve(TrajectoryShape shape, double theta) {
  switch (shape) {
    case TrajectoryShape::StraightLine:
      return {0.0, theta, 0.0, 1.0};
    case TrajectoryShape::Loop:
      // Unit circle starting at the origin heading +z, turning towards +x.
      return {1.0 - std::cos(theta), std::sin(theta), std::sin(theta), std::cos(theta)};
    case TrajectoryShape::Figure8:
      return {std::sin(theta) * std::cos(theta), std::sin(theta), std::cos(2.0 * theta),
              std::cos(theta)};
  }
  return {};
}

Matrix3d sqrt_psd(const Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(m);
  const Vector3d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

Vector6d sample_twist(const Matrix6d& cov, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(cov);
  std::normal_distribution<double> normal;
  Vector6d n;
  for (int i = 0; i < 6; ++i) n[i] = normal(rng);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * n;
}

}  // namespace

void WorldConfig::validate(const Taxonomy& taxonomy) const {
  if (landmark_count < 1) throw InvalidArgument("world needs at least one landmark");
  if ((bounds_max - bounds_min).minCoeff() < 0.0) {
    throw InvalidArgument("world bounds are inverted");
  }
  if (!class_weights.empty()) {
    if (class_weights.size() != taxonomy.size()) {
      throw InvalidArgument("class weights must cover every taxonomy class");
    }
    check_distribution(class_weights);
  }
  if (dynamic_fraction && !(*dynamic_fraction >= 0.0 && *dynamic_fraction <= 1.0)) {
    throw InvalidArgument("dynamic fraction must lie in [0, 1]");
  }
}

void TrajectoryConfig::validate() const {
  if (frames < 2) throw InvalidArgument("trajectory needs at least two frames");
  if (!(length > 0.0)) throw InvalidArgument("trajectory length must be positive");
  if (!(speed_variation >= 0.0 && speed_variation < 1.0)) {
    throw InvalidArgument("speed variation must lie in [0, 1)");
  }
}

void DropoutSimConfig::validate() const {
  if (samples < 1) throw InvalidArgument("at least one dropout sample is required");
  if (!(kappa_static > 0.0 && std::isfinite(kappa_static)) ||
      !(kappa_dynamic > 0.0 && std::isfinite(kappa_dynamic))) {
    throw InvalidArgument("dropout concentration must be finite and positive");
  }
  if (!(mislabel_rate >= 0.0 && mislabel_rate < 1.0)) {
    throw InvalidArgument("mislabel rate must lie in [0, 1)");
  }
}

void ObservationConfig::validate() const {
  if (!pixel_noise.isApprox(pixel_noise.transpose()) ||
      Eigen::SelfAdjointEigenSolver<Matrix3d>(pixel_noise).eigenvalues().minCoeff() < -1e-12) {
    throw InvalidArgument("pixel noise must be symmetric positive semi-definite");
  }
  check_spd(model_noise);
  if (!(max_depth > 0.0)) throw InvalidArgument("max depth must be positive");
}

std::vector<Landmark> generate_world(const WorldConfig& cfg, const Taxonomy& taxonomy) {
  cfg.validate(taxonomy);
  const std::size_t c = taxonomy.size();
  std::vector<double> weights =
      cfg.class_weights.empty() ? std::vector<double>(c, 1.0 / static_cast<double>(c))
                                : cfg.class_weights;

  // Per-mobility class distributions for the dynamic_fraction mode.
  std::vector<double> static_w(c, 0.0), dynamic_w(c, 0.0);
  for (std::size_t i = 0; i < c; ++i) {
    auto& target = taxonomy.is_static(static_cast<int>(i)) ? static_w : dynamic_w;
    target[i] = weights[i];
  }
  const auto fill_uniform_if_empty = [&](std::vector<double>& w, Mobility m) {
    if (std::accumulate(w.begin(), w.end(), 0.0) > 0.0) return;
    for (std::size_t i = 0; i < c; ++i) {
      if (taxonomy.at(static_cast<int>(i)).mobility == m) w[i] = 1.0;
    }
  };
  fill_uniform_if_empty(static_w, Mobility::Static);
  fill_uniform_if_empty(dynamic_w, Mobility::Dynamic);

  std::mt19937_64 rng = make_engine(cfg.seed, Stream::World);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::discrete_distribution<int> any_class(weights.begin(), weights.end());
  std::discrete_distribution<int> static_class(static_w.begin(), static_w.end());
  std::discrete_distribution<int> dynamic_class(dynamic_w.begin(), dynamic_w.end());

  std::vector<Landmark> world;
  world.reserve(cfg.landmark_count);
  for (std::size_t i = 0; i < cfg.landmark_count; ++i) {
    Landmark lm;
    lm.id = i;
    for (int a = 0; a < 3; ++a) {
      lm.position[a] = cfg.bounds_min[a] + unit(rng) * (cfg.bounds_max[a] - cfg.bounds_min[a]);
    }
    if (cfg.dynamic_fraction) {
      const bool dynamic = unit(rng) < *cfg.dynamic_fraction;
      lm.true_class = dynamic ? dynamic_class(rng) : static_class(rng);
    } else {
      lm.true_class = any_class(rng);
    }
    world.push_back(lm);
  }
  return world;
}

std::vector<Pose3> generate_trajectory(const TrajectoryConfig& cfg) {
  cfg.validate();
  const double span = cfg.shape == TrajectoryShape::StraightLine ? 1.0 : kTwoPi;

  // Cumulative arc length of the unscaled curve.
  constexpr int kTable = 20000;
  std::vector<double> arc(kTable + 1, 0.0);
  for (int i = 1; i <= kTable; ++i) {
    const CurvePoint a = curve(cfg.shape, span * (i - 1) / kTable);
    const CurvePoint b = curve(cfg.shape, span * i / kTable);
    arc[i] = arc[i - 1] + std::hypot(b.x - a.x, b.z - a.z);
  }
  const double scale = cfg.length / arc.back();

  std::vector<Pose3> poses;
  poses.reserve(cfg.frames);
  for (std::size_t k = 0; k < cfg.frames; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(cfg.frames - 1);
    // Monotone reparameterization: derivative 1 + v cos(2 pi s) > 0.
    const double s_mod = s + cfg.speed_variation * std::sin(kTwoPi * s) / kTwoPi;
    const double target = s_mod * arc.back();
    const auto it = std::lower_bound(arc.begin(), arc.end(), target);
    const int hi = std::clamp(static_cast<int>(it - arc.begin()), 1, kTable);
    const double seg = arc[hi] - arc[hi - 1];
    const double frac = seg > 0.0 ? (target - arc[hi - 1]) / seg : 0.0;
    const double theta = span * (hi - 1 + std::clamp(frac, 0.0, 1.0)) / kTable;

    const CurvePoint p = curve(cfg.shape, theta);
    const Vector3d forward = Vector3d(p.dx, 0.0, p.dz).normalized();
    const Vector3d down(0.0, 1.0, 0.0);
    const Vector3d right = down.cross(forward);
    Matrix3d r_wc;
    r_wc << right, down, forward;
    const Pose3 world_from_camera{Rotation3::nearest(r_wc),
                                  Vector3d(scale * p.x, cfg.height, scale * p.z)};
    poses.push_back(inverse(world_from_camera));
  }
  return poses;
}

std::vector<CandidateFeature> observe_frame(std::span<const Landmark> world,
                                            const CameraRig& rig, const Pose3& true_pose,
                                            const ObservationConfig& cfg,
                                            std::uint64_t seed, std::uint64_t frame) {
  cfg.validate();
  const Matrix3d noise_sqrt = sqrt_psd(cfg.pixel_noise);
  const bool noisy = cfg.pixel_noise.cwiseAbs().maxCoeff() > 0.0;

  std::vector<CandidateFeature> candidates;
  for (const auto& lm : world) {
    const Vector3d p_c = transform_point(true_pose, lm.position);
    if (!(p_c.z() > rig.depth_min) || p_c.z() > cfg.max_depth) continue;
    const StereoPixels exact = project_stereo(rig, true_pose, lm.position);
    if (!in_image(rig, exact) || !(exact.x() - exact.z() > rig.disparity_min)) continue;

    CandidateFeature c;
    c.landmark = lm;
    c.observation.pixels = exact;
    if (noisy) {
      std::mt19937_64 rng = make_engine(seed, Stream::Pixel, frame, lm.id);
      std::normal_distribution<double> normal;
      const Vector3d n(normal(rng), normal(rng), normal(rng));
      c.observation.pixels += noise_sqrt * n;
    }
    c.observation.noise = cfg.model_noise;
    c.predicted = exact;
    c.jacobian = jacobian_wrt_pose(rig, true_pose, lm.position);
    c.semantics = certain_belief(std::max(lm.true_class, 0), Taxonomy::street15().size());
    candidates.push_back(std::move(c));
  }
  return candidates;
}

SemanticBelief simulate_mc_samples(const Landmark& landmark, const DropoutSimConfig& cfg,
                                   std::uint64_t seed, std::uint64_t frame,
                                   const Taxonomy& taxonomy) {
  cfg.validate();
  const std::size_t c = taxonomy.size();
  const int true_class = std::max(landmark.true_class, 0);
  if (!cfg.enabled) return certain_belief(true_class, c);

  int label = true_class;
  if (cfg.mislabel_rate > 0.0) {
    std::mt19937_64 rng = make_engine(seed, Stream::Mislabel, frame, landmark.id);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < cfg.mislabel_rate) {
      std::uniform_int_distribution<int> other(0, static_cast<int>(c) - 2);
      const int pick = other(rng);
      label = pick >= true_class ? pick + 1 : pick;
    }
  }

  const double kappa =
      taxonomy.is_static(true_class) ? cfg.kappa_static : cfg.kappa_dynamic;
  const double label_alpha = std::max(kappa, static_cast<double>(c)) -
                             static_cast<double>(c - 1);

  std::mt19937_64 rng = make_engine(seed, Stream::Semantics, frame, landmark.id);
  std::gamma_distribution<double> off_label(1.0, 1.0);
  std::gamma_distribution<double> on_label(label_alpha, 1.0);
  std::vector<DiscreteDistribution> samples;
  samples.reserve(static_cast<std::size_t>(cfg.samples));
  for (int n = 0; n < cfg.samples; ++n) {
    std::vector<double> g(c);
    double sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      g[i] = static_cast<int>(i) == label ? on_label(rng) : off_label(rng);
      sum += g[i];
    }
    for (double& v : g) v /= sum;
    samples.emplace_back(std::move(g));
  }
  return aggregate_mc(samples);
}

double SequenceResult::final_translation_error() const {
  if (estimated.empty()) return 0.0;
  const Vector3d est = inverse(estimated.back()).translation;
  const Vector3d gt = inverse(ground_truth.back()).translation;
  return (est - gt).norm();
}

SequenceResult run_sequence(std::span<const Landmark> world, std::span<const Pose3> truth,
                            const CameraRig& rig, const SelectionConfig& selection,
                            const SimEstimatorConfig& estimator,
                            const DropoutSimConfig& dropout,
                            const ObservationConfig& observation, std::uint64_t seed) {
  rig.validate();
  selection.validate();
  observation.validate();
  DropoutSimConfig mc = dropout;
  mc.samples = selection.mc_samples;
  mc.validate();
  if (truth.empty()) throw InvalidArgument("empty trajectory");

  SequenceResult result;
  result.ground_truth.assign(truth.begin(), truth.end());

  PoseBelief belief{truth.front(), estimator.initial_covariance};
  belief.validate();

  const MeasurementUpdater updater = [&](const PoseBelief& b, const CandidateFeature& c) {
    return update_single(
        b, make_stereo_measurement(rig, {c.landmark.position, c.observation}),
        estimator.options);
  };

  for (std::size_t k = 0; k < truth.size(); ++k) {
    FrameRecord record;
    record.frame = k;
    try {
      if (k > 0) {
        MotionPrior prior;
        prior.increment = compose(truth[k], inverse(truth[k - 1]));
        prior.process_noise = estimator.process_noise;
        if (estimator.perturb_motion) {
          std::mt19937_64 rng = make_engine(seed, Stream::Motion, k);
          prior.increment = compose(exp_se3(sample_twist(estimator.process_noise, rng)),
                                    prior.increment);
        }
        belief = predict(belief, prior);
      }

      std::vector<CandidateFeature> candidates =
          observe_frame(world, rig, truth[k], observation, seed, k);
      for (auto& c : candidates) {
        c.semantics = simulate_mc_samples(c.landmark, mc, seed, k, selection.taxonomy);
        linearize(c, rig, belief.pose);
      }

      record.scores = select(belief, candidates, selection, updater);

      std::vector<PoseMeasurement> chosen;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!record.scores[i].selected) continue;
        const auto& c = candidates[i];
        chosen.push_back(
            make_stereo_measurement(rig, {c.landmark.position, c.observation}));
        auto [it, inserted] = result.map_points.try_emplace(c.landmark.id);
        if (inserted) {
          it->second.first_frame = k;
          it->second.argmax_class = c.semantics.argmax_class;
          it->second.true_class = c.landmark.true_class;
        }
        ++it->second.times_selected;
      }
      if (!chosen.empty()) {
        const UpdateResult u = update_with_stats(belief, chosen, estimator.options);
        belief = u.belief;
        record.gn_iterations = u.iterations;
        record.gn_converged = u.converged;
        record.updated = true;
      }
    } catch (const DivergedUpdate& e) {
      throw EstimatorDiverged(k, e.what());
    } catch (const BehindCamera& e) {
      throw EstimatorDiverged(k, e.what());
    } catch (const NotPositiveDefinite& e) {
      throw EstimatorDiverged(k, e.what());
    }

    result.estimated.push_back(belief.pose);
    result.covariances.push_back(belief.covariance);
    result.frames.push_back(std::move(record));
  }
  return result;
}

}  // namespace sivo
