#include "sivo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sivo/error.hpp"

namespace sivo {
namespace {

// Below this rotation magnitude the closed forms lose precision; switch to
// second-order Taylor expansions.
constexpr double kSmallAngle = 1e-8;

Vector3d vee(const Matrix3d& w) { return {w(2, 1), w(0, 2), w(1, 0)}; }

// Below this angle the cancelling coefficients switch to Taylor series.
constexpr double kSeriesAngle = 1e-2;

// sin(t) / t
double coeff_a(double t) {
  return t < kSeriesAngle ? 1.0 - t * t / 6.0 + t * t * t * t / 120.0 : std::sin(t) / t;
}

// (1 - cos t) / t^2, written without cancellation.
double coeff_b(double t) {
  if (t < kSmallAngle) return 0.5 - t * t / 24.0;
  const double s = std::sin(0.5 * t) / t;
  return 2.0 * s * s;
}

// (t - sin t) / t^3
double coeff_c(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle) return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  return (t - std::sin(t)) / (t2 * t);
}

// (1 - (t/2) cot(t/2)) / t^2
double coeff_d(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle) return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  const double half = 0.5 * t;
  return (1.0 - half * std::cos(half) / std::sin(half)) / t2;
}

// Left Jacobian of SO(3), V in t = V * rho.
Matrix3d left_jacobian(const Vector3d& omega) {
  const double theta = omega.norm();
  const Matrix3d w = skew(omega);
  return Matrix3d::Identity() + coeff_b(theta) * w + coeff_c(theta) * w * w;
}

Matrix3d left_jacobian_inverse(const Vector3d& omega) {
  const double theta = omega.norm();
  const Matrix3d w = skew(omega);
  return Matrix3d::Identity() - 0.5 * w + coeff_d(theta) * w * w;
}

}  // namespace

Rotation3 Rotation3::from_matrix(const Matrix3d& m, double tol) {
  if (!m.allFinite() || orthonormality_error(m) > tol ||
      std::abs(m.determinant() - 1.0) > tol) {
    throw InvalidArgument("matrix is not a proper rotation");
  }
  return Rotation3(m);
}

Rotation3 Rotation3::nearest(const Matrix3d& m) {
  Eigen::JacobiSVD<Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d d = Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0
                                                                          : 1.0;
  return Rotation3(svd.matrixU() * d * svd.matrixV().transpose());
}

Rotation3 Rotation3::about_axis(const Vector3d& axis, double angle) {
  return exp_so3(axis.normalized() * angle);
}

double Rotation3::orthonormality_error(const Matrix3d& m) {
  return (m.transpose() * m - Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Matrix4d Pose3::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Matrix3d skew(const Vector3d& v) {
  Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

Rotation3 exp_so3(const Vector3d& omega) {
  const double theta = omega.norm();
  const Matrix3d w = skew(omega);
  return Rotation3(Matrix3d::Identity() + coeff_a(theta) * w + coeff_b(theta) * w * w);
}

Vector3d log_so3(const Rotation3& r) {
  const Matrix3d& m = r.matrix();
  const Vector3d axial = 0.5 * vee(m - m.transpose());  // sin(theta) * n
  const double cos_theta = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double sin_theta = axial.norm();
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < kSmallAngle) {
    return axial;
  }
  if (std::numbers::pi - theta > 1e-4) {
    return axial * (theta / sin_theta);
  }

  // Near pi the antisymmetric part vanishes; recover the axis from
  // n n^T = (sym(R) - cos I) / (1 - cos).
  const Matrix3d nn = (0.5 * (m + m.transpose()) -
                       cos_theta * Matrix3d::Identity()) /
                      (1.0 - cos_theta);
  Eigen::Index k = 0;
  nn.diagonal().maxCoeff(&k);
  Vector3d n = nn.col(k) / std::sqrt(std::max(nn(k, k), 0.0));
  n.normalize();
  if (n.dot(axial) < 0.0) n = -n;
  return n * theta;
}

Pose3 exp_se3(const Twist6& xi) {
  const Vector3d rho = xi.head<3>();
  const Vector3d omega = xi.tail<3>();
  return Pose3{exp_so3(omega), left_jacobian(omega) * rho};
}

Twist6 log_se3(const Pose3& pose) {
  const Vector3d omega = log_so3(pose.rotation);
  Twist6 xi;
  xi.head<3>() = left_jacobian_inverse(omega) * pose.translation;
  xi.tail<3>() = omega;
  return xi;
}

Pose3 compose(const Pose3& a, const Pose3& b) {
  return Pose3{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Pose3 inverse(const Pose3& pose) {
  const Rotation3 rt = pose.rotation.inverse();
  return Pose3{rt, -(rt * pose.translation)};
}

Vector3d transform_point(const Pose3& pose, const Vector3d& p) {
  return pose.rotation * p + pose.translation;
}

Matrix6d adjoint(const Pose3& pose) {
  const Matrix3d& r = pose.rotation.matrix();
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = skew(pose.translation) * r;
  ad.bottomRightCorner<3, 3>() = r;
  return ad;
}

Matrix6d se3_ad(const Twist6& xi) {
  Matrix6d ad = Matrix6d::Zero();
  const Matrix3d w = skew(xi.tail<3>());
  ad.topLeftCorner<3, 3>() = w;
  ad.topRightCorner<3, 3>() = skew(xi.head<3>());
  ad.bottomRightCorner<3, 3>() = w;
  return ad;
}

Matrix6d se3_left_jacobian(const Twist6& xi) {
  // sum_n ad^n / (n + 1)!
  const Matrix6d ad = se3_ad(xi);
  Matrix6d term = Matrix6d::Identity();
  Matrix6d sum = Matrix6d::Identity();
  for (int n = 1; n < 30; ++n) {
    term = term * ad / static_cast<double>(n + 1);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-17) break;
  }
  return sum;
}

double rotation_angle(const Rotation3& r) {
  const double c = 0.5 * (r.matrix().trace() - 1.0);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace sivo
