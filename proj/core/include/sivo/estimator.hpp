#pragma once

#include <functional>
#include <span>

#include "sivo/camera.hpp"
#include "sivo/landmark.hpp"
#include "sivo/types.hpp"

namespace sivo {

/// Relative motion applied in predict: new T_cw = increment * old T_cw.
struct MotionPrior {
  Pose3 increment;
  Matrix6d process_noise = Matrix6d::Zero();
};

/// Propagates the belief through `prior`. The covariance is mapped by the
/// adjoint of the increment and inflated by the process noise.
PoseBelief predict(const PoseBelief& belief, const MotionPrior& prior);

/// Measurement model value and Jacobian at a pose.
struct Linearization {
  Vector3d predicted = Vector3d::Zero();
  Matrix36d jacobian = Matrix36d::Zero();
};

/// Three-dimensional measurement of the pose with Gaussian noise.
struct PoseMeasurement {
  Vector3d z = Vector3d::Zero();
  Matrix3d noise = Matrix3d::Identity();
  std::function<Linearization(const Pose3&)> model;
};

/// Stereo observation of a known landmark.
struct StereoMeasurement {
  Vector3d landmark = Vector3d::Zero();
  StereoObservation observation;
};

PoseMeasurement make_stereo_measurement(const CameraRig& rig,
                                        const StereoMeasurement& measurement);

struct EstimatorOptions {
  int max_iterations = 10;
  double step_tolerance = 1e-8;
  /// DivergedUpdate once the cost has risen this many iterations in a row.
  int max_consecutive_increases = 5;
};

struct UpdateResult {
  PoseBelief belief;
  int iterations = 0;
  bool converged = false;
};

/// Iterated Gauss-Newton on the stacked residual with the prior as an extra
/// term. The posterior covariance is the inverse of the Gauss-Newton
/// information matrix at the final linearization point.
UpdateResult update_with_stats(const PoseBelief& belief,
                               std::span<const PoseMeasurement> measurements,
                               const EstimatorOptions& options = {});

PoseBelief update(const PoseBelief& belief, std::span<const PoseMeasurement> measurements,
                  const EstimatorOptions& options = {});

PoseBelief update(const PoseBelief& belief, const CameraRig& rig,
                  std::span<const StereoMeasurement> measurements,
                  const EstimatorOptions& options = {});

PoseBelief update_single(const PoseBelief& belief, const PoseMeasurement& measurement,
                         const EstimatorOptions& options = {});

/// Symmetrizes in place and throws NotPositiveDefinite if not SPD.
void symmetrize_and_check(Matrix6d& covariance);

}  // namespace sivo
