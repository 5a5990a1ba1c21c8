#pragma once

#include <Eigen/Core>

namespace sivo {

using Vector3d = Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix3d = Eigen::Matrix3d;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix36d = Eigen::Matrix<double, 3, 6>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;

}  // namespace sivo
