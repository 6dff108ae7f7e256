// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "snapnet/core.hpp"
#include "snapnet/rotation3.hpp"

namespace snapnet {

// Inclusive rectangular window [m0,m1] x [n0,n1] of a Z^2 net.
struct Window2 {
  int m0 = 0, m1 = 0, n0 = 0, n1 = 0;

  int rows() const { return m1 - m0 + 1; }
  int cols() const { return n1 - n0 + 1; }
  int count() const { return rows() * cols(); }
  bool contains(int m, int n) const { return m >= m0 && m <= m1 && n >= n0 && n <= n1; }
  int offset(int m, int n) const { return (m - m0) * cols() + (n - n0); }
  bool empty() const { return m1 < m0 || n1 < n0; }
};

inline bool operator==(const Window2& a, const Window2& b) {
  return a.m0 == b.m0 && a.m1 == b.m1 && a.n0 == b.n0 && a.n1 == b.n1;
}

// Finite window of a map Z^2 -> R^3, stored row-major in m.
struct QuadNet3 {
  Window2 window;
  std::vector<Vec3> values;

  QuadNet3() = default;
  explicit QuadNet3(const Window2& w) : window(w), values(w.count(), Vec3::Zero()) {}

  Vec3& at(int m, int n) { return values[window.offset(m, n)]; }
  const Vec3& at(int m, int n) const { return values[window.offset(m, n)]; }

  template <typename F>
  void for_each(F&& f) const {
    for (int m = window.m0; m <= window.m1; ++m)
      for (int n = window.n0; n <= window.n1; ++n) f(m, n, at(m, n));
  }

  // max edge length, a convenient scale for relative tolerances
  double max_edge_length() const {
    double s = 0;
    for (int m = window.m0; m <= window.m1; ++m)
      for (int n = window.n0; n <= window.n1; ++n) {
        if (m < window.m1) s = std::max(s, (at(m + 1, n) - at(m, n)).norm());
        if (n < window.n1) s = std::max(s, (at(m, n + 1) - at(m, n)).norm());
      }
    return s;
  }
};

// Velocity field over the same window as its net.
struct VelocityField {
  Window2 window;
  std::vector<Vec3> vectors;

  VelocityField() = default;
  explicit VelocityField(const Window2& w) : window(w), vectors(w.count(), Vec3::Zero()) {}

  Vec3& at(int m, int n) { return vectors[window.offset(m, n)]; }
  const Vec3& at(int m, int n) const { return vectors[window.offset(m, n)]; }
};

inline QuadNet3 grid_plane(const Window2& window) {
  if (window.empty()) throw std::invalid_argument("grid_plane: empty window");
  QuadNet3 net(window);
  for (int m = window.m0; m <= window.m1; ++m)
    for (int n = window.n0; n <= window.n1; ++n) net.at(m, n) = Vec3(m, n, 0);
  return net;
}

// Similarity followed by an optional sphere inversion.
struct MoebiusParams {
  double scale = 1.0;
  Vec3 rotation = Vec3::Zero();  // axis-angle vector
  Vec3 translate = Vec3::Zero();
  bool invert = false;
  Vec3 center = Vec3::Zero();
  double radius = 1.0;

  bool is_identity() const {
    return scale == 1.0 && rotation.isZero() && translate.isZero() && !invert;
  }
};

inline QuadNet3 moebius_pretransform(const QuadNet3& net, const MoebiusParams& params) {
  QuadNet3 out = net;
  Mat3 R = Mat3::Identity();
  if (params.rotation.norm() > 0) R = rotation_from_axis_angle(params.rotation, params.rotation.norm());
  for (auto& v : out.values) {
    v = params.scale * (R * v) + params.translate;
    if (params.invert) {
      const Vec3 d = v - params.center;
      const double n2 = d.squaredNorm();
      if (n2 < 1e-24) throw SingularVertex("moebius_pretransform: vertex at the inversion center");
      v = params.center + params.radius * params.radius * d / n2;
    }
  }
  return out;
}

// Inverse stereographic projection: each vertex is sent to the second
// intersection of the line through `center` with the sphere.
inline QuadNet3 inverse_stereographic(const QuadNet3& net, const Vec3& center = Vec3(0, 0, 4),
                                      const Vec3& sphere_center = Vec3(0, 0, 2), double radius = 2.0) {
  QuadNet3 out = net;
  for (auto& w : out.values) {
    const Vec3 v = w - center;
    const double a = v.squaredNorm();
    if (a < 1e-24) throw ProjectionDegenerate("inverse_stereographic: vertex at the projection center");
    const Vec3 u = center - sphere_center;
    const double b = 2.0 * u.dot(v);
    const double c = u.squaredNorm() - radius * radius;
    const double disc = b * b - 4 * a * c;
    if (disc < 0) throw ProjectionDegenerate("inverse_stereographic: line misses the sphere");
    const double s1 = (-b + std::sqrt(disc)) / (2 * a);
    const double s2 = (-b - std::sqrt(disc)) / (2 * a);
    const double s = std::abs(s1) > std::abs(s2) ? s1 : s2;
    if (std::abs(s) < 1e-15) throw ProjectionDegenerate("inverse_stereographic: projection collapses");
    w = center + s * v;
  }
  return out;
}

}  // namespace snapnet
