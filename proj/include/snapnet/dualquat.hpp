// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "snapnet/core.hpp"

namespace snapnet {

struct Quaternion {
  double w = 0, x = 0, y = 0, z = 0;

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion identity() { return {1, 0, 0, 0}; }
  static Quaternion from_vector(const Vec3& v) { return {0, v.x(), v.y(), v.z()}; }

  Vec3 vec() const { return Vec3(x, y, z); }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }

  Quaternion conj() const { return {w, -x, -y, -z}; }

  Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }

  // Hamilton product, ij = k.
  Quaternion operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }
};

inline double dot4(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// Dual quaternion p = primal + eps * dual with eps^2 = 0. Poses are projective
// representatives: p and lambda*p (lambda != 0) describe the same displacement.
struct DualQuaternion {
  Quaternion primal;  // a
  Quaternion dual;    // c

  DualQuaternion() = default;
  DualQuaternion(const Quaternion& a, const Quaternion& c) : primal(a), dual(c) {}

  static DualQuaternion identity() { return {Quaternion::identity(), {}}; }

  std::array<double, 8> coords() const {
    return {primal.w, primal.x, primal.y, primal.z, dual.w, dual.x, dual.y, dual.z};
  }
  static DualQuaternion from_coords(const std::array<double, 8>& c) {
    return {{c[0], c[1], c[2], c[3]}, {c[4], c[5], c[6], c[7]}};
  }

  DualQuaternion operator+(const DualQuaternion& o) const { return {primal + o.primal, dual + o.dual}; }
  DualQuaternion operator-(const DualQuaternion& o) const { return {primal - o.primal, dual - o.dual}; }
  DualQuaternion operator*(double s) const { return {primal * s, dual * s}; }

  double max_abs_coord() const {
    double m = 0;
    for (double v : coords()) m = std::max(m, std::abs(v));
    return m;
  }
};

inline DualQuaternion dq_mul(const DualQuaternion& p, const DualQuaternion& q) {
  return {p.primal * q.primal, p.primal * q.dual + p.dual * q.primal};
}

inline DualQuaternion operator*(const DualQuaternion& p, const DualQuaternion& q) { return dq_mul(p, q); }

enum class ConjKind { quaternion, epsilon };

inline DualQuaternion dq_conjugate(const DualQuaternion& p, ConjKind kind = ConjKind::quaternion) {
  if (kind == ConjKind::epsilon) return {p.primal, -p.dual};
  return {p.primal.conj(), p.dual.conj()};
}

// Combined quaternion + epsilon conjugation; the right factor of the point
// sandwich below.
inline DualQuaternion dq_conjugate_full(const DualQuaternion& p) {
  return {p.primal.conj(), -p.dual.conj()};
}

// Scales the representative so the largest-magnitude coordinate becomes +1.
inline DualQuaternion dq_normalized(const DualQuaternion& p) {
  double best = 0;
  for (double v : p.coords())
    if (std::abs(v) > std::abs(best)) best = v;
  if (best == 0.0) return p;
  return p * (1.0 / best);
}

// Distance between projective representatives (scale and sign insensitive).
inline double dq_projective_distance(const DualQuaternion& p, const DualQuaternion& q) {
  auto a = p.coords();
  auto b = q.coords();
  double na = 0, nb = 0;
  for (int i = 0; i < 8; ++i) {
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na == 0 || nb == 0) return na == nb ? 0.0 : 1.0;
  double dplus = 0, dminus = 0;
  for (int i = 0; i < 8; ++i) {
    const double u = a[i] / na, v = b[i] / nb;
    dplus += (u - v) * (u - v);
    dminus += (u + v) * (u + v);
  }
  return std::sqrt(std::min(dplus, dminus));
}

// |a cbar + c abar| = |2 <a, c>|; vanishes exactly on the Study quadric.
inline double study_residual(const DualQuaternion& p) { return std::abs(2.0 * dot4(p.primal, p.dual)); }

inline bool on_study_quadric(const DualQuaternion& p, const Tolerances& tol = default_tolerances()) {
  return study_residual(dq_normalized(p)) <= tol.algebraic;
}

// Bilinear form of the Study quadric: s(x,y) = sum_i x_i y_{i+4} + x_{i+4} y_i.
inline double bilinear_form(const DualQuaternion& x, const DualQuaternion& y) {
  return dot4(x.primal, y.dual) + dot4(x.dual, y.primal);
}

// Rigid displacement of a point: x -> p (1 + eps x) p~ / (p pbar), where p~ is
// the combined conjugate. Identifies (x1,x2,x3) with 1 + eps(x1 i + x2 j + x3 k).
inline Vec3 act_on_point(const DualQuaternion& p, const Vec3& x,
                         const Tolerances& tol = default_tolerances()) {
  const DualQuaternion pn = dq_normalized(p);
  const double n2 = pn.primal.norm2();
  if (std::sqrt(n2) <= tol.algebraic)
    throw DegeneratePose("act_on_point: primal part vanishes (a = 0 is excluded)");
  const DualQuaternion xd{Quaternion::identity(), Quaternion::from_vector(x)};
  const DualQuaternion y = pn * xd * dq_conjugate_full(pn);
  return y.dual.vec() / n2;
}

// True when the displacement of r is a proper rotation: dual scalar part zero
// and primal vector part nonzero (identity and pure translations excluded).
inline bool is_rotation(const DualQuaternion& r, const Tolerances& tol = default_tolerances()) {
  const DualQuaternion rn = dq_normalized(r);
  return std::abs(rn.dual.w) <= tol.algebraic && rn.primal.vec().norm() > tol.algebraic;
}

}  // namespace snapnet
