#include "sivo/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sivo/error.hpp"
#include "sivo/infotheory.hpp"

namespace sivo {
namespace {

// Value compared against the threshold under a given strategy.
double decision_value(const CandidateScore& s, Strategy strategy) {
  switch (strategy) {
    case Strategy::MiOnly:
    case Strategy::AllFeatures:
      return s.mutual_information_bits;
    case Strategy::KaessBatch:
    case Strategy::DavisonGreedy:
      break;
  }
  return s.delta_h_bits;
}

CandidateScore unscored(const CandidateFeature& c) {
  CandidateScore s;
  s.candidate_id = c.landmark.id;
  s.classification_entropy_bits = c.semantics.entropy_bits;
  s.delta_h_bits = -s.classification_entropy_bits;
  s.reason = RejectionReason::BehindCamera;
  return s;
}

CandidateScore base_score(const Matrix6d& pose_cov, const CandidateFeature& c) {
  if (!c.projectable) return unscored(c);
  CandidateScore s;
  s.candidate_id = c.landmark.id;
  s.mutual_information_bits = mutual_information_score(pose_cov, c);
  s.classification_entropy_bits = c.semantics.entropy_bits;
  s.delta_h_bits = s.mutual_information_bits - s.classification_entropy_bits;
  return s;
}

// Keeps the `cap` best selected entries by decision value; earlier inputs
// win ties.
void apply_cap(std::vector<CandidateScore>& scores, const SelectionConfig& config) {
  if (!config.max_selected) return;
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].selected) chosen.push_back(i);
  }
  if (chosen.size() <= *config.max_selected) return;
  std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    return decision_value(scores[a], config.strategy) >
           decision_value(scores[b], config.strategy);
  });
  for (std::size_t k = *config.max_selected; k < chosen.size(); ++k) {
    scores[chosen[k]].selected = false;
    scores[chosen[k]].reason = RejectionReason::CapExceeded;
  }
}

}  // namespace

void linearize(CandidateFeature& candidate, const CameraRig& rig, const Pose3& pose) {
  const auto pixels = try_project_stereo(rig, pose, candidate.landmark.position);
  candidate.projectable = pixels.has_value();
  if (candidate.projectable) {
    candidate.predicted = *pixels;
    candidate.jacobian = jacobian_wrt_pose(rig, pose, candidate.landmark.position);
  } else {
    candidate.predicted.setZero();
    candidate.jacobian.setZero();
  }
}

std::string_view to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::None: return "none";
    case RejectionReason::DynamicClass: return "dynamic_class";
    case RejectionReason::BelowThreshold: return "below_threshold";
    case RejectionReason::BehindCamera: return "behind_camera";
    case RejectionReason::CapExceeded: return "cap_exceeded";
  }
  return "unknown";
}

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::DavisonGreedy: return "sivo-greedy";
    case Strategy::KaessBatch: return "sivo-batch";
    case Strategy::AllFeatures: return "all";
    case Strategy::MiOnly: return "mi";
  }
  return "unknown";
}

void SelectionConfig::validate() const {
  if (!std::isfinite(threshold_bits)) throw InvalidArgument("threshold must be finite");
  if (mc_samples < 1) throw InvalidArgument("at least one MC sample is required");
}

Eigen::MatrixXd lifted_covariance(const Matrix6d& pose_cov,
                                  std::span<const CandidateFeature> candidates) {
  check_spd(pose_cov);
  const auto n = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXd lifted(6 + 3 * n, 6 + 3 * n);
  lifted.topLeftCorner<6, 6>() = pose_cov;

  std::vector<Eigen::Matrix<double, 3, 6>> j_sigma;  // J_i * Sigma
  j_sigma.reserve(candidates.size());
  for (const auto& c : candidates) j_sigma.emplace_back(c.jacobian * pose_cov);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ci = candidates[static_cast<std::size_t>(i)];
    const auto& jsi = j_sigma[static_cast<std::size_t>(i)];
    lifted.block<3, 6>(6 + 3 * i, 0) = jsi;
    lifted.block<6, 3>(0, 6 + 3 * i) = jsi.transpose();
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& cj = candidates[static_cast<std::size_t>(j)];
      Matrix3d block = jsi * cj.jacobian.transpose();
      if (i == j) {
        block = (0.5 * (block + block.transpose()) + ci.noise()).eval();
      }
      lifted.block<3, 3>(6 + 3 * i, 6 + 3 * j) = block;
      lifted.block<3, 3>(6 + 3 * j, 6 + 3 * i) = block.transpose();
    }
  }
  return lifted;
}

Matrix9d marginal_covariance(const Matrix6d& pose_cov, const CandidateFeature& candidate) {
  const auto one = std::span<const CandidateFeature>(&candidate, 1);
  return lifted_covariance(pose_cov, one);
}

double mutual_information_score(const Matrix6d& pose_cov, const CandidateFeature& candidate) {
  return gaussian_mutual_information(marginal_covariance(pose_cov, candidate), 6);
}

CandidateScore sivo_score(const Matrix6d& pose_cov, const CandidateFeature& candidate,
                          const SelectionConfig& config) {
  CandidateScore s = base_score(pose_cov, candidate);
  if (!candidate.projectable) return s;
  if (!is_admissible(candidate.semantics, config.taxonomy)) {
    s.reason = RejectionReason::DynamicClass;
  } else if (s.delta_h_bits >= config.threshold_bits) {
    s.selected = true;
  } else {
    s.reason = RejectionReason::BelowThreshold;
  }
  return s;
}

CandidateScore score_candidate(const Matrix6d& pose_cov, const CandidateFeature& candidate,
                               const SelectionConfig& config) {
  switch (config.strategy) {
    case Strategy::KaessBatch:
    case Strategy::DavisonGreedy:
      return sivo_score(pose_cov, candidate, config);
    case Strategy::AllFeatures:
    case Strategy::MiOnly:
      break;
  }
  CandidateScore s = base_score(pose_cov, candidate);
  if (!candidate.projectable) return s;
  if (config.strategy == Strategy::AllFeatures ||
      s.mutual_information_bits >= config.threshold_bits) {
    s.selected = true;
  } else {
    s.reason = RejectionReason::BelowThreshold;
  }
  return s;
}

std::vector<CandidateScore> select_batch(const PoseBelief& belief,
                                         std::span<const CandidateFeature> candidates,
                                         const SelectionConfig& config) {
  config.validate();
  std::vector<CandidateScore> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    scores.push_back(score_candidate(belief.covariance, c, config));
  }
  apply_cap(scores, config);
  return scores;
}

std::vector<CandidateScore> select_greedy(const PoseBelief& belief,
                                          std::span<const CandidateFeature> candidates,
                                          const SelectionConfig& config,
                                          const MeasurementUpdater& updater) {
  config.validate();
  std::vector<CandidateScore> scores;
  scores.reserve(candidates.size());
  std::vector<std::size_t> open;  // still eligible for selection
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scores.push_back(sivo_score(belief.covariance, candidates[i], config));
    if (candidates[i].projectable && is_admissible(candidates[i].semantics, config.taxonomy)) {
      open.push_back(i);
    }
  }

  PoseBelief current = belief;
  std::size_t taken = 0;
  while (!open.empty()) {
    auto best = open.begin();
    for (auto it = open.begin(); it != open.end(); ++it) {
      if (scores[*it].delta_h_bits > scores[*best].delta_h_bits) best = it;
    }
    if (scores[*best].delta_h_bits < config.threshold_bits) break;
    if (config.max_selected && taken == *config.max_selected) {
      for (std::size_t i : open) {
        if (scores[i].selected) scores[i].reason = RejectionReason::CapExceeded;
        scores[i].selected = false;
      }
      return scores;
    }

    const std::size_t pick = *best;
    open.erase(best);
    scores[pick].selected = true;
    scores[pick].reason = RejectionReason::None;
    ++taken;

    current = updater(current, candidates[pick]);
    for (std::size_t i : open) {
      scores[i] = sivo_score(current.covariance, candidates[i], config);
    }
  }
  for (std::size_t i : open) {
    scores[i].selected = false;
    scores[i].reason = RejectionReason::BelowThreshold;
  }
  return scores;
}

std::vector<CandidateScore> select(const PoseBelief& belief,
                                   std::span<const CandidateFeature> candidates,
                                   const SelectionConfig& config,
                                   const MeasurementUpdater& updater) {
  if (config.strategy == Strategy::DavisonGreedy) {
    return select_greedy(belief, candidates, config, updater);
  }
  return select_batch(belief, candidates, config);
}

}  // namespace sivo
