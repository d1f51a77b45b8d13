#pragma once

#include <Eigen/Dense>

namespace klshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Largest per-element basis count: (p+1)^2 for p <= 5.
inline constexpr int kMaxBasis = 36;

// Nodal coordinate block for one element (columns are nodes).
using NodeBlock = Eigen::Matrix<double, 3, Eigen::Dynamic, Eigen::ColMajor, 3, kMaxBasis>;

}  // namespace klshell
