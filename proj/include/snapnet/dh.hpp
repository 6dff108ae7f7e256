// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "snapnet/core.hpp"
#include "snapnet/line_axis.hpp"

namespace snapnet {

// Denavit-Hartenberg parameters of consecutive joint axes.
//   a     distance along the common normal
//   d     offset along the axis between the feet of the two adjacent normals
//   alpha twist angle between the directions, in [0, pi]
struct DHParams {
  double a = 0;
  double d = 0;
  double alpha = 0;
};

namespace detail {

struct NormalFeet {
  Vec3 on_a;
  Vec3 on_b;
  bool parallel = false;
};

// Feet of the common perpendicular. For parallel lines the foot on A is the
// point of A closest to the origin, projected across.
inline NormalFeet common_normal_feet(const LineAxis& A, const LineAxis& B) {
  const Vec3 za = A.direction.normalized(), zb = B.direction.normalized();
  const Vec3 pa = A.point_closest_to_origin(), pb = B.point_closest_to_origin();
  const Vec3 w0 = pb - pa;
  const double b = za.dot(zb);
  const double den = 1.0 - b * b;
  if (den < 1e-18) {
    NormalFeet f;
    f.parallel = true;
    f.on_a = pa;
    f.on_b = pb + (pa - pb).dot(zb) * zb;
    return f;
  }
  const double d0 = za.dot(w0);
  const double e0 = zb.dot(w0);
  const double s = (d0 - b * e0) / den;
  const double t = (b * d0 - e0) / den;
  return {pa + s * za, pb + t * zb, false};
}

}  // namespace detail

// Distance and twist between two axes. The offset field requires a cycle
// context (a third axis) and is reported as 0 here; see dh_cycle.
inline DHParams dh_between_axes(const LineAxis& A, const LineAxis& B,
                                const Tolerances& tol = default_tolerances()) {
  if (same_line(A, B, tol.geometric)) throw CoincidentAxes("dh_between_axes: axes coincide");
  const auto feet = detail::common_normal_feet(A, B);
  DHParams p;
  p.a = (feet.on_b - feet.on_a).norm();
  p.alpha = std::acos(std::clamp(A.direction.normalized().dot(B.direction.normalized()), -1.0, 1.0));
  p.d = 0;
  return p;
}

// DH parameters around a closed cycle of axes. d_i is the signed offset along
// axis i from the foot of the normal toward the previous axis to the foot of
// the normal toward the next axis, measured along the stored direction.
template <std::size_t N>
std::array<DHParams, N> dh_cycle(const std::array<LineAxis, N>& axes,
                                 const Tolerances& tol = default_tolerances()) {
  std::array<DHParams, N> out;
  std::array<Vec3, N> foot_out, foot_in;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t j = (i + 1) % N;
    if (same_line(axes[i], axes[j], tol.geometric)) throw CoincidentAxes("dh_cycle: consecutive axes coincide");
    const auto feet = detail::common_normal_feet(axes[i], axes[j]);
    foot_out[i] = feet.on_a;
    foot_in[j] = feet.on_b;
    out[i].a = (feet.on_b - feet.on_a).norm();
    out[i].alpha = std::acos(
        std::clamp(axes[i].direction.normalized().dot(axes[j].direction.normalized()), -1.0, 1.0));
  }
  for (std::size_t i = 0; i < N; ++i)
    out[i].d = (foot_out[i] - foot_in[i]).dot(axes[i].direction.normalized());
  return out;
}

template <std::size_t N>
double dh_max_difference(const std::array<DHParams, N>& a, const std::array<DHParams, N>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < N; ++i) {
    worst = std::max(worst, std::abs(a[i].a - b[i].a));
    worst = std::max(worst, std::abs(a[i].d - b[i].d));
    worst = std::max(worst, std::abs(a[i].alpha - b[i].alpha));
  }
  return worst;
}

}  // namespace snapnet
