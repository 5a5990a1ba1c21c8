#pragma once

#include <optional>

#include "sivo/geometry.hpp"
#include "sivo/types.hpp"

namespace sivo {

/// Rectified stereo rig. The right camera sits `baseline` metres along the
/// left camera's +x axis with identical intrinsics.
struct CameraRig {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double baseline = 0.0;
  int width = 0;
  int height = 0;
  /// Points at or nearer than this camera-frame depth do not project.
  double depth_min = 0.1;
  /// Triangulation refuses disparities at or below this many pixels.
  double disparity_min = 0.25;

  /// Throws InvalidArgument on non-positive focal lengths or baseline, or a
  /// principal point outside the image.
  void validate() const;
};

/// Stereo pixel coordinates (u_left, v, u_right).
using StereoPixels = Vector3d;

struct StereoObservation {
  StereoPixels pixels = StereoPixels::Zero();
  Matrix3d noise = Matrix3d::Identity();  ///< px^2

  double disparity() const { return pixels.x() - pixels.z(); }
};

/// Pinhole projection of `p_w` into both cameras of the rig.
/// Throws BehindCamera when the camera-frame depth is <= rig.depth_min.
StereoPixels project_stereo(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w);

std::optional<StereoPixels> try_project_stereo(const CameraRig& rig,
                                               const Pose3& camera_from_world,
                                               const Vector3d& p_w);

/// Inverse of project_stereo. Throws DegenerateDisparity when
/// u_left - u_right <= rig.disparity_min.
Vector3d triangulate(const CameraRig& rig, const Pose3& camera_from_world,
                     const StereoPixels& pixels);

/// d(project_stereo)/d(delta) for pose <- exp(delta) * pose.
Matrix36d jacobian_wrt_pose(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w);

/// d(project_stereo)/d(p_w).
Matrix3d jacobian_wrt_point(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w);

/// True when both left and right pixels fall inside the image.
bool in_image(const CameraRig& rig, const StereoPixels& pixels);

}  // namespace sivo
