#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace dexmap {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Transform = Eigen::Isometry3d;
using VecX = Eigen::VectorXd;

/// Cross-product matrix: skew(x) * y == x.cross(y).
inline Mat3 skew(const Vec3& x) {
  Mat3 m;
  m << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return m;
}

/// Rotation matrix of an axis-angle vector (angle = norm).
inline Mat3 rotation_from_axis_angle(const Vec3& r) {
  const double theta = r.norm();
  if (theta < 1e-12) {
    return Mat3::Identity() + skew(r);
  }
  return Eigen::AngleAxisd(theta, r / theta).toRotationMatrix();
}

inline Vec3 axis_angle_from_rotation(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.axis() * aa.angle();
}

/// Left Jacobian of the SO(3) exponential map:
/// exp(r + dr) ~= exp(skew(J(r) dr)) exp(r).
inline Mat3 so3_left_jacobian(const Vec3& r) {
  const double theta = r.norm();
  const Mat3 K = skew(r);
  if (theta < 1e-5) {
    return Mat3::Identity() + 0.5 * K + (1.0 / 6.0) * K * K;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() + ((1.0 - std::cos(theta)) / t2) * K +
         ((theta - std::sin(theta)) / (t2 * theta)) * K * K;
}

/// URDF-style fixed-axis roll/pitch/yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

inline Transform make_transform(const Mat3& R, const Vec3& t) {
  Transform T = Transform::Identity();
  T.linear() = R;
  T.translation() = t;
  return T;
}

/// Any unit vector orthogonal to n (n must be unit).
inline Vec3 any_orthogonal(const Vec3& n) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(a).normalized();
}

}  // namespace dexmap
