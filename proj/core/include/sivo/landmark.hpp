#pragma once

#include <cstdint>

#include "sivo/geometry.hpp"
#include "sivo/types.hpp"

namespace sivo {

using LandmarkId = std::uint64_t;

/// World-frame point. `true_class` is simulator ground truth (or -1 when
/// unknown, as in replayed data).
struct Landmark {
  LandmarkId id = 0;
  Vector3d position = Vector3d::Zero();
  int true_class = -1;
};

/// Camera-from-world pose estimate with a 6x6 covariance expressed in the
/// left-perturbation tangent space, ordered (rho, omega).
struct PoseBelief {
  Pose3 pose;
  Matrix6d covariance = Matrix6d::Identity();

  /// Throws NotPositiveDefinite unless the covariance is symmetric SPD.
  void validate() const;
};

}  // namespace sivo
