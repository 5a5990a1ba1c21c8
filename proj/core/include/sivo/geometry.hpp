#pragma once

#include "sivo/types.hpp"

namespace sivo {

/// Tangent-space coordinates of SE(3): (rho, omega), translation first.
///
/// Perturbations are applied on the left everywhere in the library:
///   T <- exp_se3(delta) * T
/// Every Jacobian and covariance is expressed in this convention. This is
/// the single place the convention is defined; flipping it means touching
/// exp/log users in camera.cpp and estimator.cpp.
using Twist6 = Vector6d;

/// Proper rotation matrix. Construction from an arbitrary matrix is checked.
class Rotation3 {
 public:
  Rotation3() : matrix_(Matrix3d::Identity()) {}

  /// Throws InvalidArgument unless R^T R = I and det R = 1 within `tol`.
  static Rotation3 from_matrix(const Matrix3d& m, double tol = 1e-9);
  /// Closest rotation in the Frobenius sense (SVD projection).
  static Rotation3 nearest(const Matrix3d& m);
  static Rotation3 about_axis(const Vector3d& axis, double angle);

  const Matrix3d& matrix() const { return matrix_; }

  Rotation3 operator*(const Rotation3& other) const {
    return Rotation3(matrix_ * other.matrix_);
  }
  Vector3d operator*(const Vector3d& v) const { return matrix_ * v; }
  Rotation3 inverse() const { return Rotation3(matrix_.transpose()); }

  /// Largest elementwise deviation of R^T R from identity.
  static double orthonormality_error(const Matrix3d& m);

 private:
  explicit Rotation3(const Matrix3d& m) : matrix_(m) {}
  friend Rotation3 exp_so3(const Vector3d& omega);

  Matrix3d matrix_;
};

/// Rigid transform. Within the estimator this is camera-from-world (T_cw).
struct Pose3 {
  Rotation3 rotation;
  Vector3d translation = Vector3d::Zero();

  static Pose3 identity() { return {}; }

  /// 4x4 homogeneous form.
  Eigen::Matrix4d matrix() const;
};

Matrix3d skew(const Vector3d& v);

Rotation3 exp_so3(const Vector3d& omega);
Vector3d log_so3(const Rotation3& r);

Pose3 exp_se3(const Twist6& xi);
/// Principal branch, ||omega|| <= pi. At exactly pi either axis sign may be
/// returned; both reproduce the same pose.
Twist6 log_se3(const Pose3& pose);

Pose3 compose(const Pose3& a, const Pose3& b);
Pose3 inverse(const Pose3& pose);
Vector3d transform_point(const Pose3& pose, const Vector3d& p);

inline Pose3 operator*(const Pose3& a, const Pose3& b) { return compose(a, b); }

/// Adjoint of `pose` acting on twists ordered (rho, omega):
/// pose * exp(xi) = exp(adjoint(pose) * xi) * pose.
Matrix6d adjoint(const Pose3& pose);

/// Small adjoint ad(xi) = [[w^, rho^], [0, w^]].
Matrix6d se3_ad(const Twist6& xi);

/// Left Jacobian of SE(3): exp(xi + d) ~= exp(J_l(xi) d) * exp(xi).
/// Evaluated by its power series; intended for ||xi|| well below pi.
Matrix6d se3_left_jacobian(const Twist6& xi);

/// Rotation angle of R in radians, in [0, pi].
double rotation_angle(const Rotation3& r);

}  // namespace sivo
