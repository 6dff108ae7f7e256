// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "snapnet/dh.hpp"
#include "snapnet/rotation3.hpp"
#include "snapnet/studynet.hpp"

namespace snapnet {

enum class FourBarFamily { rigid, snapping, shaky, mobile_planar, mobile_spherical, mobile_bennett };

inline const char* to_string(FourBarFamily f) {
  switch (f) {
    case FourBarFamily::rigid: return "rigid";
    case FourBarFamily::snapping: return "snapping";
    case FourBarFamily::shaky: return "shaky";
    case FourBarFamily::mobile_planar: return "mobile_planar";
    case FourBarFamily::mobile_spherical: return "mobile_spherical";
    case FourBarFamily::mobile_bennett: return "mobile_bennett";
  }
  return "?";
}

struct AssemblyConfiguration {
  double theta0 = 0;  // joint 0 angle relative to the input configuration
  double theta1 = 0;  // joint 1 angle
  double residual = 0;
};

struct Classification {
  FourBarFamily family = FourBarFamily::rigid;
  int config_count = 0;  // -1 for mobile families (a continuum)
  std::vector<AssemblyConfiguration> configurations;
};

namespace detail {

inline double wrap_angle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

struct PairInvariants {
  double dist = 0;
  double angle = 0;  // signed twist about the normal oriented from A to B
};

inline PairInvariants oriented_pair_invariants(const LineAxis& A, const LineAxis& B) {
  const Vec3 za = A.direction.normalized(), zb = B.direction.normalized();
  const Vec3 pa = A.point_closest_to_origin(), pb = B.point_closest_to_origin();
  const Vec3 cr = za.cross(zb);
  const double s = cr.norm();
  if (s < 1e-13) {
    Vec3 w = pb - pa;
    w -= w.dot(za) * za;
    return {w.norm(), za.dot(zb) > 0 ? 0.0 : M_PI};
  }
  Vec3 n = cr / s;
  double dist = (pb - pa).dot(n);
  if (dist < 0) {
    n = -n;
    dist = -dist;
  }
  return {dist, std::atan2(za.cross(zb).dot(n), za.dot(zb))};
}

// Closure of the loop expressed with the two base joints. The necessary
// condition is that the moved pair (R2(theta1), R3(theta0)) stays directly
// congruent to the coupler's input pair.
struct ClosureSystem {
  std::array<LineAxis, 4> axes;
  PairInvariants coupler;      // invariants of (R2, R3) at the input configuration
  Vec3 marker2, marker3;       // common-normal feet on R2 (toward R1) and R3 (toward R0)
  Vec3 dir2, dir3;             // unit directions of R2, R3
  double scale = 1;

  explicit ClosureSystem(const std::array<LineAxis, 4>& ax) : axes(ax) {
    coupler = oriented_pair_invariants(axes[2], axes[3]);
    const auto feet21 = detail::common_normal_feet(axes[2], axes[1]);
    const auto feet30 = detail::common_normal_feet(axes[3], axes[0]);
    marker2 = feet21.on_a;
    marker3 = feet30.on_a;
    dir2 = axes[2].direction.normalized();
    dir3 = axes[3].direction.normalized();
    for (int i = 0; i < 4; ++i) {
      scale = std::max(scale, axes[i].point_closest_to_origin().norm());
      scale = std::max(scale, line_line_distance(axes[i], axes[(i + 1) % 4]));
    }
  }

  // Cheap candidate residual: direct-congruence invariants of the moved pair.
  Eigen::Vector2d invariant_residual(double theta0, double theta1) const {
    const RigidMotion m1 = rotation_about_line_motion(axes[1], theta1);
    const RigidMotion m0 = rotation_about_line_motion(axes[0], theta0);
    const PairInvariants inv = oriented_pair_invariants(m1.apply(axes[2]), m0.apply(axes[3]));
    return {inv.dist - coupler.dist, wrap_angle(inv.angle - coupler.angle)};
  }

  // Full revolute closure: the coupler pose is constrained to the circle
  // M1 * Rot(R2, phi); joint 3 must then see its input line and bearing point.
  Eigen::Matrix<double, 6, 1> full_residual(double theta0, double theta1, double phi) const {
    const RigidMotion m1 = rotation_about_line_motion(axes[1], theta1);
    const RigidMotion m0 = rotation_about_line_motion(axes[0], theta0);
    const RigidMotion coupler_pose = m1.compose(rotation_about_line_motion(axes[2], phi));
    const Vec3 dir_c = coupler_pose.rotation * dir3;
    const Vec3 pt_c = coupler_pose.apply(marker3);
    const Vec3 dir_t = m0.rotation * dir3;
    const Vec3 pt_t = m0.apply(marker3);
    Eigen::Matrix<double, 6, 1> r;
    r << (dir_c - dir_t), (pt_c - pt_t) / scale;
    return r;
  }
};

inline bool all_parallel(const std::array<LineAxis, 4>& axes, double tol) {
  const Vec3 d0 = axes[0].direction.normalized();
  for (int i = 1; i < 4; ++i)
    if (d0.cross(axes[i].direction.normalized()).norm() > tol) return false;
  return true;
}

inline bool all_concurrent(const std::array<LineAxis, 4>& axes, double tol, double scale) {
  // least-squares common point of the four lines
  Mat3 A = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& L : axes) {
    const Vec3 u = L.direction.normalized();
    const Mat3 P = Mat3::Identity() - u * u.transpose();
    A += P;
    b += P * L.point_closest_to_origin();
  }
  const Vec3 x = A.ldlt().solve(b);
  for (const auto& L : axes) {
    const Vec3 u = L.direction.normalized();
    const Vec3 w = x - L.point_closest_to_origin();
    if ((w - w.dot(u) * u).norm() > tol * std::max(1.0, scale)) return false;
  }
  return true;
}

inline bool bennett_conditions(const std::array<LineAxis, 4>& axes, double tol) {
  std::array<DHParams, 4> dh;
  try {
    dh = dh_cycle(axes);
  } catch (const CoincidentAxes&) {
    return false;
  }
  const double s = std::max({dh[0].a, dh[1].a, dh[2].a, dh[3].a, 1.0});
  auto eq = [&](double x, double y) { return std::abs(x - y) <= tol * s; };
  for (int i = 0; i < 4; ++i)
    if (std::abs(dh[i].d) > tol * s) return false;
  if (!eq(dh[0].a, dh[2].a) || !eq(dh[1].a, dh[3].a)) return false;
  if (std::abs(dh[0].alpha - dh[2].alpha) > tol && std::abs(dh[0].alpha + dh[2].alpha - 2 * M_PI) > tol)
    return false;
  if (std::abs(dh[1].alpha - dh[3].alpha) > tol && std::abs(dh[1].alpha + dh[3].alpha - 2 * M_PI) > tol)
    return false;
  const double s0 = std::sin(dh[0].alpha), s1 = std::sin(dh[1].alpha);
  if (std::abs(s0) < tol || std::abs(s1) < tol) return false;
  return std::abs(dh[0].a / s0 - dh[1].a / s1) <= tol * s;
}

}  // namespace detail

// Counts the real assembly configurations of the 4R loop with the given axes.
// Mobile families are detected by geometric predicates first; otherwise the
// two-joint closure system is scanned on a dense grid, candidates are polished
// and verified against the full revolute constraints.
inline Classification classify_fourbar(const std::array<LineAxis, 4>& axes, std::uint64_t seed,
                                       int grid = 720, const Tolerances& tol = default_tolerances()) {
  for (int i = 0; i < 4; ++i)
    if (same_line(axes[i], axes[(i + 1) % 4], 1e-8))
      throw std::invalid_argument("classify_fourbar: consecutive axes must be distinct");

  Classification out;
  const double ptol = 1e-8;
  detail::ClosureSystem sys(axes);
  if (detail::all_parallel(axes, ptol)) {
    out.family = FourBarFamily::mobile_planar;
    out.config_count = -1;
    return out;
  }
  if (detail::all_concurrent(axes, ptol, sys.scale)) {
    out.family = FourBarFamily::mobile_spherical;
    out.config_count = -1;
    return out;
  }
  if (detail::bennett_conditions(axes, ptol)) {
    out.family = FourBarFamily::mobile_bennett;
    out.config_count = -1;
    return out;
  }

  (void)seed;
  // stage 1: dense scan of the invariant residual
  std::vector<double> theta(grid);
  for (int i = 0; i < grid; ++i) theta[i] = -M_PI + 2.0 * M_PI * i / grid;
  std::vector<std::vector<double>> val(grid, std::vector<double>(grid));
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) val[i][j] = sys.invariant_residual(theta[i], theta[j]).norm();

  const double coarse = 0.05 * std::max(1.0, sys.scale);
  std::vector<Eigen::Vector2d> candidates;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double v = val[i][j];
      if (v > coarse) continue;
      bool ismin = true;
      for (int di = -1; di <= 1 && ismin; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          if (val[(i + di + grid) % grid][(j + dj + grid) % grid] < v) {
            ismin = false;
            break;
          }
        }
      if (!ismin) continue;
      // Newton polish of the 2x2 system
      Eigen::Vector2d x(theta[i], theta[j]);
      bool converged = false;
      for (int it = 0; it < 80; ++it) {
        const Eigen::Vector2d r = sys.invariant_residual(x[0], x[1]);
        if (r.norm() < 1e-12 * std::max(1.0, sys.scale)) {
          converged = true;
          break;
        }
        const double h = 1e-7;
        Eigen::Matrix2d J;
        J.col(0) = (sys.invariant_residual(x[0] + h, x[1]) - r) / h;
        J.col(1) = (sys.invariant_residual(x[0], x[1] + h) - r) / h;
        const Eigen::Vector2d dx = J.colPivHouseholderQr().solve(-r);
        x += dx;
        if (dx.norm() < 1e-15) break;
      }
      if (!converged) continue;
      x[0] = detail::wrap_angle(x[0]);
      x[1] = detail::wrap_angle(x[1]);
      bool dup = false;
      for (const auto& c : candidates) {
        const double d = std::hypot(detail::wrap_angle(c[0] - x[0]), detail::wrap_angle(c[1] - x[1]));
        if (d < 1e-6) dup = true;
      }
      if (!dup) candidates.push_back(x);
    }
  }

  // stage 2: verify each candidate against the full revolute closure
  std::vector<AssemblyConfiguration> verified;
  for (const auto& cand : candidates) {
    double best_phi = 0, best_val = std::numeric_limits<double>::max();
    const int pgrid = 2048;
    for (int k = 0; k < pgrid; ++k) {
      const double phi = -M_PI + 2.0 * M_PI * k / pgrid;
      const double v = sys.full_residual(cand[0], cand[1], phi).norm();
      if (v < best_val) {
        best_val = v;
        best_phi = phi;
      }
    }
    Eigen::Vector3d x(cand[0], cand[1], best_phi);
    for (int it = 0; it < 80; ++it) {
      const auto r = sys.full_residual(x[0], x[1], x[2]);
      if (r.norm() < 1e-13) break;
      const double h = 1e-7;
      Eigen::Matrix<double, 6, 3> J;
      J.col(0) = (sys.full_residual(x[0] + h, x[1], x[2]) - r) / h;
      J.col(1) = (sys.full_residual(x[0], x[1] + h, x[2]) - r) / h;
      J.col(2) = (sys.full_residual(x[0], x[1], x[2] + h) - r) / h;
      const Eigen::Vector3d dx = J.colPivHouseholderQr().solve(-r);
      x += dx;
      if (dx.norm() < 1e-15) break;
    }
    const double res = sys.full_residual(x[0], x[1], x[2]).norm();
    if (res < 1e-9) {
      AssemblyConfiguration ac{detail::wrap_angle(x[0]), detail::wrap_angle(x[1]), res};
      bool dup = false;
      for (const auto& v : verified)
        if (std::hypot(detail::wrap_angle(v.theta0 - ac.theta0), detail::wrap_angle(v.theta1 - ac.theta1)) < 1e-6)
          dup = true;
      if (!dup) verified.push_back(ac);
    } else if (res > 1e-9 && res < 1e-6) {
      throw Inconclusive("classify_fourbar: refinement stalled at residual " + std::to_string(res));
    }
  }

  if (verified.empty())
    throw Inconclusive("classify_fourbar: the input configuration was not recovered by the scan");
  if (static_cast<int>(verified.size()) > 8)
    throw Inconclusive("classify_fourbar: solution set looks continuous; mobile case not recognized");

  out.configurations = verified;
  out.config_count = static_cast<int>(verified.size());
  if (out.config_count >= 2) {
    out.family = FourBarFamily::snapping;
    return out;
  }

  // single configuration: shaky iff the closure Jacobian drops rank there
  const auto& c = verified.front();
  double best_phi = 0, best_val = std::numeric_limits<double>::max();
  for (int k = 0; k < 2048; ++k) {
    const double phi = -M_PI + 2.0 * M_PI * k / 2048;
    const double v = sys.full_residual(c.theta0, c.theta1, phi).norm();
    if (v < best_val) {
      best_val = v;
      best_phi = phi;
    }
  }
  const double h = 1e-6;
  Eigen::Matrix<double, 6, 3> J;
  const auto r0 = sys.full_residual(c.theta0, c.theta1, best_phi);
  J.col(0) = (sys.full_residual(c.theta0 + h, c.theta1, best_phi) - r0) / h;
  J.col(1) = (sys.full_residual(c.theta0, c.theta1 + h, best_phi) - r0) / h;
  J.col(2) = (sys.full_residual(c.theta0, c.theta1, best_phi + h) - r0) / h;
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 3>> jsvd(J);
  const double cond = jsvd.singularValues()(2) / jsvd.singularValues()(0);
  out.family = cond < 1e-5 ? FourBarFamily::shaky : FourBarFamily::rigid;
  return out;
}

}  // namespace snapnet
