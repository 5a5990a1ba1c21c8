#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sivo/camera.hpp"
#include "sivo/landmark.hpp"
#include "sivo/semantics.hpp"
#include "sivo/types.hpp"

namespace sivo {

/// One feature that could be used to update the pose: its landmark, the
/// actual stereo observation, and the measurement model linearized at the
/// current pose estimate.
struct CandidateFeature {
  Landmark landmark;
  StereoObservation observation;
  StereoPixels predicted = StereoPixels::Zero();  ///< h_i(x_t)
  Matrix36d jacobian = Matrix36d::Zero();         ///< dh_i/dx at x_t
  bool projectable = true;  ///< false when the landmark is behind the estimate
  SemanticBelief semantics;

  const Matrix3d& noise() const { return observation.noise; }
};

/// Recomputes `predicted`, `jacobian` and `projectable` at `pose`.
void linearize(CandidateFeature& candidate, const CameraRig& rig, const Pose3& pose);

enum class RejectionReason { None, DynamicClass, BelowThreshold, BehindCamera, CapExceeded };

std::string_view to_string(RejectionReason reason);

struct CandidateScore {
  LandmarkId candidate_id = 0;
  double mutual_information_bits = 0.0;
  double classification_entropy_bits = 0.0;
  double delta_h_bits = 0.0;  ///< mutual information minus classification entropy
  bool selected = false;
  RejectionReason reason = RejectionReason::None;
};

enum class Strategy {
  DavisonGreedy,  ///< pick the best, update, re-score, repeat
  KaessBatch,     ///< one pass against the prior covariance
  AllFeatures,    ///< keep every projectable candidate
  MiOnly,         ///< class-blind mutual-information threshold
};

std::string_view to_string(Strategy strategy);

struct SelectionConfig {
  double threshold_bits = 2.0;
  Strategy strategy = Strategy::KaessBatch;
  int mc_samples = 6;
  std::optional<std::size_t> max_selected;
  Taxonomy taxonomy = Taxonomy::street15();

  /// Throws InvalidArgument on a non-finite threshold or mc_samples < 1.
  void validate() const;
};

/// Joint covariance of the pose and every candidate measurement,
/// (6 + 3n) x (6 + 3n), pose block first.
Eigen::MatrixXd lifted_covariance(const Matrix6d& pose_cov,
                                  std::span<const CandidateFeature> candidates);

/// The (pose, z_i) block of lifted_covariance for a single candidate.
Matrix9d marginal_covariance(const Matrix6d& pose_cov, const CandidateFeature& candidate);

/// Mutual information in bits between the pose and one measurement.
double mutual_information_score(const Matrix6d& pose_cov, const CandidateFeature& candidate);

/// Semantic-information score: admissibility first, then
/// mutual information minus classification entropy against the threshold.
/// Independent of config.strategy.
CandidateScore sivo_score(const Matrix6d& pose_cov, const CandidateFeature& candidate,
                          const SelectionConfig& config);

/// Score under the rule of config.strategy (no cap applied).
CandidateScore score_candidate(const Matrix6d& pose_cov, const CandidateFeature& candidate,
                               const SelectionConfig& config);

/// One pass over the candidates with no state update between decisions.
/// Output order matches input order. Handles KaessBatch, MiOnly and
/// AllFeatures; DavisonGreedy is scored as KaessBatch here.
std::vector<CandidateScore> select_batch(const PoseBelief& belief,
                                         std::span<const CandidateFeature> candidates,
                                         const SelectionConfig& config);

/// Applies one measurement to a belief.
using MeasurementUpdater =
    std::function<PoseBelief(const PoseBelief&, const CandidateFeature&)>;

/// Repeatedly selects the candidate with the largest score, applies
/// `updater`, and re-scores the rest against the new covariance until the
/// best remaining score falls below the threshold. Ties go to the lowest
/// index. Output order matches input order.
std::vector<CandidateScore> select_greedy(const PoseBelief& belief,
                                          std::span<const CandidateFeature> candidates,
                                          const SelectionConfig& config,
                                          const MeasurementUpdater& updater);

/// Dispatches on config.strategy. `updater` is only used by DavisonGreedy.
std::vector<CandidateScore> select(const PoseBelief& belief,
                                   std::span<const CandidateFeature> candidates,
                                   const SelectionConfig& config,
                                   const MeasurementUpdater& updater);

}  // namespace sivo
