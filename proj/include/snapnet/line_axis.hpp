// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "snapnet/core.hpp"
#include "snapnet/dualquat.hpp"

namespace snapnet {

// Spatial line in Pluecker coordinates (direction d, moment m) with m = P x d
// for any point P on the line and <d, m> = 0. Coordinates are projective: any
// nonzero multiple denotes the same oriented line up to orientation flip for
// negative factors.
struct LineAxis {
  Vec3 direction = Vec3::Zero();
  Vec3 moment = Vec3::Zero();

  LineAxis() = default;
  LineAxis(const Vec3& d, const Vec3& m) : direction(d), moment(m) {}

  static LineAxis through_point(const Vec3& point, const Vec3& dir) {
    return {dir, point.cross(dir)};
  }

  Vec3 point_closest_to_origin() const { return direction.cross(moment) / direction.squaredNorm(); }

  double pluecker_residual() const {
    const double s = direction.norm() * moment.norm();
    if (s == 0.0) return 0.0;
    return std::abs(direction.dot(moment)) / std::max(s, direction.squaredNorm());
  }

  bool valid(const Tolerances& tol = default_tolerances()) const {
    return direction.norm() > 0 && pluecker_residual() <= tol.geometric;
  }

  LineAxis unit() const {
    const double n = direction.norm();
    return {direction / n, moment / n};
  }
};

// Scale/sign insensitive distance between the 6-vectors.
inline double line_projective_distance(const LineAxis& a, const LineAxis& b) {
  Eigen::Matrix<double, 6, 1> u, v;
  u << a.direction, a.moment;
  v << b.direction, b.moment;
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) return nu == nv ? 0.0 : 1.0;
  u /= nu;
  v /= nv;
  return std::min((u - v).norm(), (u + v).norm());
}

// Same unoriented line in space (independent of representative scale).
inline bool same_line(const LineAxis& a, const LineAxis& b, double tol = 1e-9) {
  return line_projective_distance(a, b) <= tol;
}

inline double line_line_distance(const LineAxis& A, const LineAxis& B) {
  const Vec3 za = A.direction.normalized(), zb = B.direction.normalized();
  const Vec3 pa = A.point_closest_to_origin(), pb = B.point_closest_to_origin();
  const Vec3 cr = za.cross(zb);
  const double s = cr.norm();
  if (s < 1e-13) {
    Vec3 w = pb - pa;
    w -= w.dot(za) * za;
    return w.norm();
  }
  return std::abs((pb - pa).dot(cr / s));
}

// Transported line under the displacement of p: p (d + eps m) pbar / (p pbar).
// Keeps the transported orientation and unit scale of the input representative.
inline LineAxis act_on_line(const DualQuaternion& p, const LineAxis& L,
                            const Tolerances& tol = default_tolerances()) {
  const DualQuaternion pn = dq_normalized(p);
  const double n2 = pn.primal.norm2();
  if (std::sqrt(n2) <= tol.algebraic) throw DegeneratePose("act_on_line: primal part vanishes");
  const DualQuaternion ld{Quaternion::from_vector(L.direction), Quaternion::from_vector(L.moment)};
  const DualQuaternion y = pn * ld * dq_conjugate(pn);
  return {y.primal.vec() / n2, y.dual.vec() / n2};
}

// Pluecker coordinates of the rotation axis: the vector parts (Im a, Im c).
inline LineAxis rotation_axis(const DualQuaternion& r, const Tolerances& tol = default_tolerances()) {
  if (!is_rotation(r, tol)) throw NotARotation("rotation_axis: displacement is not a rotation");
  return {r.primal.vec(), r.dual.vec()};
}

// Rotation about a line by angle theta as a dual quaternion:
// cos(theta/2) + sin(theta/2) (d + eps m) with unit-direction scaling.
inline DualQuaternion rotation_about_line(const LineAxis& L, double theta) {
  const LineAxis u = L.unit();
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  return {Quaternion(c, s * u.direction.x(), s * u.direction.y(), s * u.direction.z()),
          Quaternion(0, s * u.moment.x(), s * u.moment.y(), s * u.moment.z())};
}

}  // namespace snapnet
