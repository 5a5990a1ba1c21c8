#include "sivo/camera.hpp"

#include <cmath>

#include "sivo/error.hpp"

namespace sivo {
namespace {

Vector3d camera_point(const CameraRig& rig, const Pose3& pose, const Vector3d& p_w) {
  const Vector3d p_c = transform_point(pose, p_w);
  if (!(p_c.z() > rig.depth_min)) {
    throw BehindCamera("point depth " + std::to_string(p_c.z()) +
                       " m is not beyond the near cutoff");
  }
  return p_c;
}

StereoPixels pinhole(const CameraRig& rig, const Vector3d& p_c) {
  const double inv_z = 1.0 / p_c.z();
  return {rig.fx * p_c.x() * inv_z + rig.cx,  //
          rig.fy * p_c.y() * inv_z + rig.cy,  //
          rig.fx * (p_c.x() - rig.baseline) * inv_z + rig.cx};
}

// d(pixels)/d(p_c)
Matrix3d projection_jacobian(const CameraRig& rig, const Vector3d& p_c) {
  const double inv_z = 1.0 / p_c.z();
  const double inv_z2 = inv_z * inv_z;
  Matrix3d j;
  j << rig.fx * inv_z, 0.0, -rig.fx * p_c.x() * inv_z2,  //
      0.0, rig.fy * inv_z, -rig.fy * p_c.y() * inv_z2,   //
      rig.fx * inv_z, 0.0, -rig.fx * (p_c.x() - rig.baseline) * inv_z2;
  return j;
}

}  // namespace

void CameraRig::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  if (!(baseline > 0.0)) throw InvalidArgument("stereo baseline must be positive");
  if (width <= 0 || height <= 0) throw InvalidArgument("image size must be positive");
  if (cx < 0.0 || cx > width || cy < 0.0 || cy > height) {
    throw InvalidArgument("principal point lies outside the image");
  }
  if (!(depth_min >= 0.0) || !(disparity_min >= 0.0)) {
    throw InvalidArgument("depth and disparity cutoffs must be non-negative");
  }
}

StereoPixels project_stereo(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w) {
  return pinhole(rig, camera_point(rig, camera_from_world, p_w));
}

std::optional<StereoPixels> try_project_stereo(const CameraRig& rig,
                                               const Pose3& camera_from_world,
                                               const Vector3d& p_w) {
  const Vector3d p_c = transform_point(camera_from_world, p_w);
  if (!(p_c.z() > rig.depth_min)) return std::nullopt;
  return pinhole(rig, p_c);
}

Vector3d triangulate(const CameraRig& rig, const Pose3& camera_from_world,
                     const StereoPixels& pixels) {
  const double disparity = pixels.x() - pixels.z();
  if (!(disparity > rig.disparity_min)) {
    throw DegenerateDisparity("disparity " + std::to_string(disparity) +
                              " px is too small to triangulate");
  }
  const double z = rig.fx * rig.baseline / disparity;
  const Vector3d p_c{(pixels.x() - rig.cx) * z / rig.fx,
                     (pixels.y() - rig.cy) * z / rig.fy, z};
  return transform_point(inverse(camera_from_world), p_c);
}

Matrix36d jacobian_wrt_pose(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w) {
  const Vector3d p_c = camera_point(rig, camera_from_world, p_w);
  // exp(delta) * p_c ~= p_c + rho + omega x p_c
  Matrix36d dpc;
  dpc.leftCols<3>() = Matrix3d::Identity();
  dpc.rightCols<3>() = -skew(p_c);
  return projection_jacobian(rig, p_c) * dpc;
}

Matrix3d jacobian_wrt_point(const CameraRig& rig, const Pose3& camera_from_world,
                            const Vector3d& p_w) {
  const Vector3d p_c = camera_point(rig, camera_from_world, p_w);
  return projection_jacobian(rig, p_c) * camera_from_world.rotation.matrix();
}

bool in_image(const CameraRig& rig, const StereoPixels& pixels) {
  const auto inside_u = [&](double u) { return u >= 0.0 && u < rig.width; };
  return inside_u(pixels.x()) && inside_u(pixels.z()) && pixels.y() >= 0.0 &&
         pixels.y() < rig.height;
}

}  // namespace sivo
