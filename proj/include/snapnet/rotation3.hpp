// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "snapnet/core.hpp"
#include "snapnet/line_axis.hpp"

namespace snapnet {

inline Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// Cayley transform C(v) = (I - [v]x)(I + [v]x)^-1, evaluated in closed form.
// Always a proper rotation; C(v)^-1 = C(-v).
inline Mat3 cayley_transform(const Vec3& v) {
  const double n2 = v.squaredNorm();
  Mat3 m = (1.0 - n2) * Mat3::Identity();
  m += 2.0 * v * v.transpose();
  m -= 2.0 * cross_matrix(v);
  return m / (1.0 + n2);
}

inline Mat3 rotation_from_axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

inline double rotation_angle(const Mat3& R) {
  return std::acos(std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0));
}

// Unit +1-eigenvector. The skew part gives 2 sin(theta) * axis and is exact
// away from angle pi; near pi the symmetric rank-one part 2(1-cos) u u^T is
// well conditioned and takes over.
inline Vec3 rotation_axis_unit(const Mat3& R) {
  const Vec3 skew(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double s = skew.norm();
  const double c = (R.trace() - 1.0) / 2.0;
  if (s >= 0.2 || c > 0) {
    if (s < 1e-14) return Vec3::UnitX();  // identity: any axis
    return skew / s;
  }
  const Mat3 M = R + R.transpose() - (R.trace() - 1.0) * Mat3::Identity();
  int col = 0;
  double best = -1;
  for (int k = 0; k < 3; ++k) {
    const double n = M.col(k).norm();
    if (n > best) {
      best = n;
      col = k;
    }
  }
  Vec3 u = M.col(col).normalized();
  if (s > 1e-13 && skew.dot(u) < 0) u = -u;
  return u;
}

struct RigidMotion {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidMotion identity() { return {}; }

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }

  LineAxis apply(const LineAxis& L) const {
    const Vec3 p = L.point_closest_to_origin();
    const Vec3 d = rotation * L.direction;
    return {d, apply(p).cross(d)};
  }

  RigidMotion inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }

  // this o other
  RigidMotion compose(const RigidMotion& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

inline RigidMotion rotation_about_line_motion(const LineAxis& L, double angle) {
  const Mat3 R = rotation_from_axis_angle(L.direction, angle);
  const Vec3 p = L.point_closest_to_origin();
  return {R, p - R * p};
}

// Least-squares rigid fit (orthogonal Procrustes with det +1) mapping src onto
// dst. Returns the motion and the max per-point residual.
inline std::pair<RigidMotion, double> fit_rigid(const std::vector<Vec3>& src,
                                                const std::vector<Vec3>& dst) {
  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  const int n = static_cast<int>(src.size());
  for (int i = 0; i < n; ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;
  Mat3 H = Mat3::Zero();
  for (int i = 0; i < n; ++i) H += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Mat3 R = svd.matrixV() * D * svd.matrixU().transpose();
  RigidMotion motion{R, cd - R * cs};
  double worst = 0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, (motion.apply(src[i]) - dst[i]).norm());
  return {motion, worst};
}

}  // namespace snapnet
