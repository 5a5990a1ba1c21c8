#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "sivo/camera.hpp"
#include "sivo/geometry.hpp"
#include "sivo/selection.hpp"

namespace sivo::testing {

inline Eigen::VectorXd random_normal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

/// Well-conditioned random SPD matrix.
inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng, double ridge = 0.1) {
  const Eigen::MatrixXd a = random_matrix(n, n, rng);
  return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

inline Pose3 random_pose(std::mt19937_64& rng, double rot = 1.0, double trans = 1.0) {
  Vector6d xi = random_normal(6, rng);
  xi.head<3>() *= trans;
  xi.tail<3>() *= rot;
  return exp_se3(xi);
}

/// Small rig used by the hand-evaluated projection examples.
inline CameraRig toy_rig() {
  CameraRig rig;
  rig.fx = rig.fy = 100.0;
  rig.cx = rig.cy = 50.0;
  rig.baseline = 0.5;
  rig.width = rig.height = 100;
  return rig;
}

inline CameraRig kitti_rig() {
  CameraRig rig;
  rig.fx = rig.fy = 718.856;
  rig.cx = 607.1928;
  rig.cy = 185.2157;
  rig.baseline = 0.537;
  rig.width = 1241;
  rig.height = 376;
  return rig;
}

/// Candidate with a prescribed Jacobian and noise, certain on `class_id`.
inline CandidateFeature synthetic_candidate(LandmarkId id, const Matrix36d& jacobian,
                                            const Matrix3d& noise, int class_id = 2) {
  CandidateFeature c;
  c.landmark.id = id;
  c.landmark.true_class = class_id;
  c.jacobian = jacobian;
  c.observation.noise = noise;
  c.semantics = certain_belief(class_id, 15);
  return c;
}

}  // namespace sivo::testing
