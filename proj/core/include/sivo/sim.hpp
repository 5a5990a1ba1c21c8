#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sivo/camera.hpp"
#include "sivo/estimator.hpp"
#include "sivo/landmark.hpp"
#include "sivo/selection.hpp"
#include "sivo/semantics.hpp"

namespace sivo {

struct WorldConfig {
  std::size_t landmark_count = 1000;
  Vector3d bounds_min{-50.0, -8.0, -50.0};
  Vector3d bounds_max{50.0, 2.0, 50.0};
  /// One weight per taxonomy class; empty means uniform.
  std::vector<double> class_weights;
  /// When set, mobility is drawn first with this dynamic probability and the
  /// class is then drawn from class_weights restricted to that mobility.
  std::optional<double> dynamic_fraction;
  std::uint64_t seed = 0;

  void validate(const Taxonomy& taxonomy) const;
};

enum class TrajectoryShape { StraightLine, Loop, Figure8 };

/// Ground-plane trajectory in a world frame with x right, y down, z forward.
/// The camera looks along the direction of travel.
struct TrajectoryConfig {
  TrajectoryShape shape = TrajectoryShape::Loop;
  double length = 200.0;  ///< path length, metres
  std::size_t frames = 500;
  /// Relative amplitude of a sinusoidal speed modulation, in [0, 1).
  double speed_variation = 0.0;
  double height = 0.0;  ///< camera y coordinate

  void validate() const;
};

/// Simulated Monte-Carlo dropout. Each forward pass is a Dirichlet draw whose
/// total concentration is max(kappa, C): off-label classes get a unit
/// pseudo-count and the label receives the rest. kappa <= C gives the flat
/// Dirichlet; kappa -> infinity gives one-hot samples.
struct DropoutSimConfig {
  bool enabled = true;  ///< false: certain one-hot beliefs on the true class
  int samples = 6;
  double kappa_static = 100.0;
  double kappa_dynamic = 100.0;
  double mislabel_rate = 0.0;

  void validate() const;
};

struct ObservationConfig {
  /// Covariance of the noise actually added to simulated pixels (PSD; zero
  /// gives exact projections).
  Matrix3d pixel_noise = Matrix3d::Identity();
  /// Covariance Q_i attached to each candidate for scoring and fusion (SPD).
  Matrix3d model_noise = Matrix3d::Identity();
  double max_depth = 80.0;  ///< metres

  void validate() const;
};

struct SimEstimatorConfig {
  Matrix6d initial_covariance = Matrix6d::Identity() * 1e-6;
  Matrix6d process_noise = Matrix6d::Identity() * 1e-4;
  /// Corrupt the odometry increment with noise drawn from process_noise.
  bool perturb_motion = true;
  EstimatorOptions options;
};

std::vector<Landmark> generate_world(const WorldConfig& cfg,
                                     const Taxonomy& taxonomy = Taxonomy::street15());

/// Camera-from-world poses along the configured path.
std::vector<Pose3> generate_trajectory(const TrajectoryConfig& cfg);

/// Candidates for every landmark visible from `true_pose`, with additive
/// Gaussian pixel noise keyed by (seed, frame, landmark id). Candidates are
/// linearized at `true_pose` and carry certain beliefs on the true class.
std::vector<CandidateFeature> observe_frame(std::span<const Landmark> world,
                                            const CameraRig& rig, const Pose3& true_pose,
                                            const ObservationConfig& cfg,
                                            std::uint64_t seed, std::uint64_t frame);

/// Simulated MC-dropout belief for one observation of `landmark`.
SemanticBelief simulate_mc_samples(const Landmark& landmark, const DropoutSimConfig& cfg,
                                   std::uint64_t seed, std::uint64_t frame,
                                   const Taxonomy& taxonomy = Taxonomy::street15());

struct FrameRecord {
  std::size_t frame = 0;
  std::vector<CandidateScore> scores;
  int gn_iterations = 0;
  bool gn_converged = false;
  bool updated = false;
};

struct MapPoint {
  std::size_t first_frame = 0;
  int argmax_class = 0;  ///< belief argmax when first selected
  int true_class = -1;
  std::size_t times_selected = 0;
};

struct SequenceResult {
  std::vector<Pose3> estimated;     ///< camera-from-world
  std::vector<Pose3> ground_truth;  ///< camera-from-world
  std::vector<Matrix6d> covariances;
  std::vector<FrameRecord> frames;
  std::map<LandmarkId, MapPoint> map_points;

  /// Distance between estimated and true camera centres at the last frame.
  double final_translation_error() const;
};

/// Runs predict -> observe -> select -> update for every pose in `truth`.
/// The MC sample count comes from selection.mc_samples.
/// Throws EstimatorDiverged carrying the failing frame.
SequenceResult run_sequence(std::span<const Landmark> world, std::span<const Pose3> truth,
                            const CameraRig& rig, const SelectionConfig& selection,
                            const SimEstimatorConfig& estimator,
                            const DropoutSimConfig& dropout,
                            const ObservationConfig& observation, std::uint64_t seed);

}  // namespace sivo
