// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <set>

#include "snapnet/dh.hpp"
#include "snapnet/koenigs.hpp"
#include "snapnet/quadnet.hpp"
#include "snapnet/rotation3.hpp"
#include "snapnet/studynet.hpp"

namespace snapnet {

// Unique rigid motion mapping one quadrilateral onto a directly congruent one.
inline RigidMotion align_faces(const std::array<Vec3, 4>& source, const std::array<Vec3, 4>& target,
                               const Tolerances& tol = default_tolerances()) {
  std::vector<Vec3> src(source.begin(), source.end()), dst(target.begin(), target.end());
  auto [motion, res] = fit_rigid(src, dst);
  double scale = 0;
  for (int i = 0; i < 4; ++i) scale = std::max(scale, (source[i] - source[(i + 1) % 4]).norm());
  if (res > std::sqrt(tol.geometric) * std::max(1.0, scale))
    throw NotCongruent("align_faces: quadrilaterals are not directly congruent");
  return motion;
}

enum class RollDirection { axis1, axis2 };

namespace detail {

inline void check_roll_indices(const Window2& w, int m, int n, int dm, int dn) {
  if (!w.contains(m + dm, n + dn) || !w.contains(m - dm, n - dn))
    throw IndexOutOfWindow("rolling: increment/decrement leaves the window");
}

}  // namespace detail

// Relative rotation of the discrete rolling motion between the two black faces
// adjacent to vertex i: C(t fstar_{pi i}) C(-t fstar_{mu i}).
inline Mat3 rolling_rotation(const QuadNet3& fstar, int m, int n, RollDirection dir, double t) {
  const int dm = dir == RollDirection::axis1 ? 1 : 0;
  const int dn = dir == RollDirection::axis1 ? 0 : 1;
  detail::check_roll_indices(fstar.window, m, n, dm, dn);
  const Vec3 fpi = fstar.at(m + dm, n + dn);
  const Vec3 fmu = fstar.at(m - dm, n - dn);
  return cayley_transform(t * fpi) * cayley_transform(-t * fmu);
}

// Snap angle of the cell, folded into [0, pi] so that it matches the rotation
// angle extracted from the matrix trace.
inline double snap_angle(const QuadNet3& fstar, int m, int n, RollDirection dir, double t) {
  const int dm = dir == RollDirection::axis1 ? 1 : 0;
  const int dn = dir == RollDirection::axis1 ? 0 : 1;
  detail::check_roll_indices(fstar.window, m, n, dm, dn);
  const Vec3 fpi = fstar.at(m + dm, n + dn);
  const Vec3 fmu = fstar.at(m - dm, n - dn);
  const double c = (1.0 + t * t * fmu.dot(fpi)) /
                   std::sqrt((1.0 + t * t * fmu.squaredNorm()) * (1.0 + t * t * fpi.squaredNorm()));
  return 2.0 * std::acos(std::clamp(std::abs(c), 0.0, 1.0));
}

// Direction of the rotation axis in the fixed frame:
// u = fstar_pi - fstar_mu + t fstar_pi x fstar_mu.
inline Vec3 axis_direction(const QuadNet3& fstar, int m, int n, RollDirection dir, double t,
                           const Tolerances& tol = default_tolerances()) {
  const int dm = dir == RollDirection::axis1 ? 1 : 0;
  const int dn = dir == RollDirection::axis1 ? 0 : 1;
  detail::check_roll_indices(fstar.window, m, n, dm, dn);
  const Vec3 fpi = fstar.at(m + dm, n + dn);
  const Vec3 fmu = fstar.at(m - dm, n - dn);
  const Vec3 u = fpi - fmu + t * fpi.cross(fmu);
  if (u.norm() <= tol.geometric * std::max(1.0, fpi.norm() + fmu.norm()))
    throw DegenerateAxis("axis_direction: direction vanishes (shaky or identity cell)");
  return u;
}

using GridIndex = std::pair<int, int>;

enum class AxisFlag { ok, shaky_like, reflection_like };

inline const char* to_string(AxisFlag f) {
  switch (f) {
    case AxisFlag::ok: return "ok";
    case AxisFlag::shaky_like: return "shaky_like";
    case AxisFlag::reflection_like: return "reflection_like";
  }
  return "?";
}

struct SnapAxis {
  LineAxis fixed;
  LineAxis everted;
  Vec3 anchor_fixed = Vec3::Zero();    // vertex of the fixed surface on the axis
  Vec3 anchor_everted = Vec3::Zero();  // matching vertex of the moving surface
  double snap_angle = 0;
  AxisFlag flag = AxisFlag::ok;
};

struct SnapCell {
  std::array<GridIndex, 4> corners;  // axis keys in cyclic order
  double closure_residual = 0;
};

struct SnapLink {
  std::array<GridIndex, 4> corners;
};

// Paired axis configurations of a snapping four-bar net, with the dual-graph
// combinatorics of the checkerboard: white faces are four-bar cells, black
// faces are links, axes sit on the shared corners.
struct SnappingNet {
  std::map<GridIndex, SnapAxis> axes;
  std::map<GridIndex, SnapCell> cells;
  std::map<GridIndex, SnapLink> links;

  double max_closure_residual = 0;
  double max_anchor_residual = 0;
  double max_angle_formula_error = 0;  // vs snap_angle, when provenance is known
  double max_axis_formula_error = 0;   // angular, vs axis_direction

  int snapping_cell_count() const {
    int count = 0;
    for (const auto& [idx, cell] : cells) {
      bool ok = true;
      for (const auto& c : cell.corners) ok = ok && axes.at(c).flag == AxisFlag::ok;
      count += ok ? 1 : 0;
    }
    return count;
  }
};

struct RollOptions {
  const QuadNet3* fstar = nullptr;  // Koenigs provenance for formula cross-checks
  double t = 0;
};

// Rolls the moving surface gp over the fixed surface gm along coincident black
// faces. Both nets use diagonal-lattice coordinates and the checkerboard color
// convention of ColoredNet (face black iff U+V even).
inline SnappingNet roll_build(const ColoredNet& gp, const ColoredNet& gm,
                              const RollOptions& opts = {}, const Tolerances& tol = default_tolerances()) {
  if (!(gp.net.window == gm.net.window)) throw std::invalid_argument("roll_build: windows differ");
  const Window2& w = gp.net.window;
  SnappingNet out;

  auto face_points = [&](const QuadNet3& g, int U, int V) {
    return std::array<Vec3, 4>{g.at(U, V), g.at(U + 1, V), g.at(U + 1, V + 1), g.at(U, V + 1)};
  };

  // links: black faces
  for (int U = w.m0; U < w.m1; ++U)
    for (int V = w.n0; V < w.n1; ++V)
      if (ColoredNet::face_black(U, V))
        out.links[{U, V}] = SnapLink{{GridIndex{U, V}, {U + 1, V}, {U + 1, V + 1}, {U, V + 1}}};

  const double scale = std::max(1.0, gm.net.max_edge_length());

  for (int U = w.m0; U < w.m1; ++U) {
    for (int V = w.n0; V < w.n1; ++V) {
      if (ColoredNet::face_black(U, V)) continue;
      // the four surrounding black faces, counterclockwise from the
      // lexicographically smallest
      const GridIndex B[4] = {{U - 1, V}, {U, V - 1}, {U + 1, V}, {U, V + 1}};
      bool inside = true;
      for (const auto& b : B)
        inside = inside && b.first >= w.m0 && b.first < w.m1 && b.second >= w.n0 && b.second < w.n1;
      if (!inside) continue;
      const GridIndex shared[4] = {{U, V}, {U + 1, V}, {U + 1, V + 1}, {U, V + 1}};

      std::array<RigidMotion, 4> M;
      for (int k = 0; k < 4; ++k) {
        try {
          M[k] = align_faces(face_points(gp.net, B[k].first, B[k].second),
                             face_points(gm.net, B[k].first, B[k].second), tol);
        } catch (const NotCongruent&) {
          throw NotCongruent("roll_build: black faces around cell (" + std::to_string(U) + "," +
                             std::to_string(V) + ") are not directly congruent");
        }
      }

      SnapCell cell;
      cell.corners = {shared[0], shared[1], shared[2], shared[3]};

      RigidMotion closure = RigidMotion::identity();
      for (int k = 0; k < 4; ++k) {
        const RigidMotion rel = M[(k + 1) % 4].compose(M[k].inverse());
        closure = rel.compose(closure);

        const GridIndex s = shared[k];
        const Vec3 anchor = gm.net.at(s.first, s.second);
        out.max_anchor_residual =
            std::max(out.max_anchor_residual, (rel.apply(anchor) - anchor).norm() / scale);

        const double angle = rotation_angle(rel.rotation);
        SnapAxis ax;
        ax.snap_angle = angle;
        ax.anchor_fixed = anchor;
        ax.anchor_everted = gp.net.at(s.first, s.second);
        if (angle < 1e-6)
          ax.flag = AxisFlag::shaky_like;
        else if (angle > M_PI - 1e-6)
          ax.flag = AxisFlag::reflection_like;
        const Vec3 dir = rotation_axis_unit(rel.rotation);
        ax.fixed = LineAxis::through_point(anchor, dir);
        const RigidMotion inv = M[k].inverse();
        ax.everted = LineAxis::through_point(ax.anchor_everted, inv.rotation * dir);

        auto it = out.axes.find(s);
        if (it == out.axes.end()) {
          out.axes[s] = ax;
        } else if (ax.flag == AxisFlag::ok && it->second.flag == AxisFlag::ok) {
          // the neighboring cell sees the inverse rotation about the same line
          if (!same_line(it->second.fixed, ax.fixed, 1e-6) ||
              std::abs(it->second.snap_angle - ax.snap_angle) > 1e-6)
            throw ClosureFailed("roll_build: axis at shared vertex disagrees between cells");
        }
      }
      cell.closure_residual =
          (closure.rotation - Mat3::Identity()).norm() + closure.translation.norm() / scale;
      out.max_closure_residual = std::max(out.max_closure_residual, cell.closure_residual);
      if (cell.closure_residual > 1e-6)
        throw ClosureFailed("roll_build: rotations around cell (" + std::to_string(U) + "," +
                            std::to_string(V) + ") do not close");
      out.cells[{U, V}] = cell;
    }
  }

  // formula cross-checks for nets arising from a Koenigs pipeline
  if (opts.fstar) {
    for (auto& [s, ax] : out.axes) {
      if (ax.flag != AxisFlag::ok) continue;
      const auto [m, n] = ColoredNet::source_vertex(s.first, s.second);
      const RollDirection dir = (((m % 2) + 2) % 2 == 0) ? RollDirection::axis2 : RollDirection::axis1;
      const int dm = dir == RollDirection::axis1 ? 1 : 0, dn = 1 - (dir == RollDirection::axis1 ? 1 : 0);
      if (!opts.fstar->window.contains(m + dm, n + dn) || !opts.fstar->window.contains(m - dm, n - dn))
        continue;
      const double a = snap_angle(*opts.fstar, m, n, dir, opts.t);
      out.max_angle_formula_error = std::max(out.max_angle_formula_error, std::abs(a - ax.snap_angle));
      const Vec3 u = axis_direction(*opts.fstar, m, n, dir, opts.t).normalized();
      const Vec3 e = ax.fixed.direction.normalized();
      out.max_axis_formula_error =
          std::max(out.max_axis_formula_error, std::atan2(u.cross(e).norm(), std::abs(u.dot(e))));
    }
  }
  return out;
}

// Snapping four-bar net of a 2-dimensional S-net: axes carry the edge
// rotations, everted axes are their pull-backs into the moving frame of the
// edge tail (one globally consistent second assembly). The embedding places
// the S-net vertex (m,n) at the black face with lower-left (m+n-1, n-m) and
// the S-net face (m,n) at the white face (m+n, n-m).
inline SnappingNet snapping_net_from_snet(const SNet& net, const Tolerances& tol = default_tolerances()) {
  if (net.dim != 2) throw std::invalid_argument("snapping_net_from_snet: requires a 2-dimensional net");
  SnappingNet out;
  const RotationNet rn = rotation_net(net, tol);

  auto edge_key = [](const MultiIndex& tail, int axis) -> GridIndex {
    const int m = tail[0], n = tail[1];
    if (axis == 0) return {m + n, n - m};       // edge (m,n)-(m+1,n)
    return {m + n, n - m + 1};                  // edge (m,n)-(m,n+1)
  };

  for (const auto& [key, r] : rn.edges) {
    const auto& [tail, axis] = key;
    SnapAxis ax;
    ax.fixed = rotation_axis(r, tol);
    const DualQuaternion& ptail = net.vertices.at(tail);
    ax.everted = act_on_line(dq_conjugate(ptail), ax.fixed, tol);
    ax.anchor_fixed = ax.fixed.point_closest_to_origin();
    ax.anchor_everted = act_on_point(dq_conjugate(ptail), ax.anchor_fixed, tol);
    const Quaternion a = dq_normalized(r).primal;
    double angle = 2.0 * std::atan2(a.vec().norm(), std::abs(a.w));
    ax.snap_angle = angle;
    if (angle < 1e-6)
      ax.flag = AxisFlag::shaky_like;
    else if (angle > M_PI - 1e-6)
      ax.flag = AxisFlag::reflection_like;
    out.axes[edge_key(tail, axis)] = ax;
  }

  // links: S-net vertices; cells: S-net faces
  for (const auto& [idx, p] : net.vertices) {
    const int m = idx[0], n = idx[1];
    const GridIndex e[4] = {edge_key({m - 1, n}, 0), edge_key({m, n - 1}, 1), edge_key({m, n}, 0),
                            edge_key({m, n}, 1)};
    bool complete = true;
    for (const auto& k : e) complete = complete && out.axes.count(k);
    if (complete) out.links[{m + n - 1, n - m}] = SnapLink{{e[0], e[1], e[2], e[3]}};

    MultiIndex j{m + 1, n}, l{m, n + 1}, k2{m + 1, n + 1};
    if (net.vertices.count(j) && net.vertices.count(l) && net.vertices.count(k2)) {
      const GridIndex c[4] = {edge_key({m, n}, 0), edge_key({m + 1, n}, 1), edge_key({m, n + 1}, 0),
                              edge_key({m, n}, 1)};
      bool ok = true;
      for (const auto& kk : c) ok = ok && out.axes.count(kk);
      if (ok) {
        SnapCell cell;
        cell.corners = {c[0], c[1], c[2], c[3]};
        RotationQuadrilateral q = face_quadrilateral(rn, idx);
        cell.closure_residual = face_closure_residual(q);
        out.max_closure_residual = std::max(out.max_closure_residual, cell.closure_residual);
        out.cells[{m + n, n - m}] = cell;
      }
    }
  }
  return out;
}

// FourBar of one cell of a snapping net, corners in the cell's cyclic order.
inline FourBar fourbar_from_cell(const SnappingNet& net, const GridIndex& cell_index) {
  const SnapCell& cell = net.cells.at(cell_index);
  FourBar fb;
  for (int k = 0; k < 4; ++k) {
    const SnapAxis& ax = net.axes.at(cell.corners[k]);
    fb.fixed_axes[k] = ax.fixed;
    fb.everted_axes[k] = ax.everted;
  }
  fb.dh = dh_cycle(fb.fixed_axes);
  return fb;
}

struct CongruentQuadPair {
  std::array<Vec3, 4> fixed_quad;    // on the fixed axes
  std::array<Vec3, 4> everted_quad;  // the congruent partner, axes 2,3 aligned
  bool direct = false;
  double residual = 0;
};

namespace detail {

// Orthonormal frame adapted to an ordered pair of skew lines: origin at the
// common-normal foot on A, x along the normal toward B, z along A.
inline RigidMotion line_pair_frame(const LineAxis& A, const LineAxis& B) {
  const auto feet = common_normal_feet(A, B);
  if (feet.parallel) throw DegenerateAxis("line_pair_frame: axes are parallel");
  const Vec3 x = (feet.on_b - feet.on_a).normalized();
  const Vec3 z = A.direction.normalized();
  const Vec3 y = z.cross(x);
  RigidMotion f;
  f.rotation.col(0) = x;
  f.rotation.col(1) = y;
  f.rotation.col(2) = z;
  f.translation = feet.on_a;
  return f;
}

inline Vec3 transfer_point_between_axes(const Vec3& p, const LineAxis& from_axis, const Vec3& from_foot,
                                        const LineAxis& to_axis, const Vec3& to_foot) {
  const double s = (p - from_foot).dot(from_axis.direction.normalized());
  return to_foot + s * to_axis.direction.normalized();
}

}  // namespace detail

// Completes a congruent quadrilateral pair on the axes of a snapping four-bar
// from two prescribed neighboring points g_i (on fixed axis 0) and g_j (on
// fixed axis 1): the everted configuration is aligned along axes 2 and 3, and
// the remaining vertices are cut out by the perpendicular bisector planes of
// the prescribed points and their moving counterparts.
inline CongruentQuadPair congruent_quad_on_axes(const FourBar& fb, const Vec3& g_i, const Vec3& g_j,
                                                const Tolerances& tol = default_tolerances()) {
  double scale = std::max({1.0, g_i.norm(), g_j.norm()});
  for (int k = 0; k < 4; ++k)
    scale = std::max(scale, fb.fixed_axes[k].point_closest_to_origin().norm());
  auto on_axis = [&](const Vec3& p, const LineAxis& L) {
    const Vec3 q = L.point_closest_to_origin();
    const Vec3 u = L.direction.normalized();
    const Vec3 d = p - q;
    return (d - d.dot(u) * u).norm() <= std::sqrt(tol.geometric) * scale;
  };
  if (!on_axis(g_i, fb.fixed_axes[0]) || !on_axis(g_j, fb.fixed_axes[1]))
    throw PointsOffAxis("congruent_quad_on_axes: prescribed points must lie on axes 0 and 1");

  // moving counterparts of the prescribed points, via the link (0,1)
  const auto feet01 = detail::common_normal_feet(fb.fixed_axes[0], fb.fixed_axes[1]);
  const auto feet10 = detail::common_normal_feet(fb.fixed_axes[1], fb.fixed_axes[0]);
  const auto efeet01 = detail::common_normal_feet(fb.everted_axes[0], fb.everted_axes[1]);
  const auto efeet10 = detail::common_normal_feet(fb.everted_axes[1], fb.everted_axes[0]);
  Vec3 h_i = detail::transfer_point_between_axes(g_i, fb.fixed_axes[0], feet01.on_a,
                                                 fb.everted_axes[0], efeet01.on_a);
  Vec3 h_j = detail::transfer_point_between_axes(g_j, fb.fixed_axes[1], feet10.on_a,
                                                 fb.everted_axes[1], efeet10.on_a);

  // bisector planes and their axis intersections
  auto bisector_cut = [&](const Vec3& g, const Vec3& h, const LineAxis& axis) {
    const Vec3 mid = 0.5 * (g + h);
    const Vec3 nrm = h - g;
    if (nrm.norm() <= tol.geometric * scale)
      throw DegenerateAxis("congruent_quad_on_axes: bisector plane undefined (coincident pair)");
    const Vec3 u = axis.direction.normalized();
    const double den = nrm.dot(u);
    if (std::abs(den) <= 1e-12 * nrm.norm())
      throw ParallelPlaneAxis("congruent_quad_on_axes: bisector plane parallel to target axis");
    const Vec3 p0 = axis.point_closest_to_origin();
    const double s = nrm.dot(mid - p0) / den;
    return Vec3(p0 + s * u);
  };

  // Rigidly place the everted configuration so axes 2 and 3 coincide with the
  // fixed ones, feet matching. The stored orientations may need flipping (the
  // configurations are congruent as unoriented line pairs), and two
  // line-preserving placements can differ by a half turn about the common
  // normal; candidates are tried in a fixed order and the first one that
  // completes the construction with congruent quads wins.
  const RigidMotion frame_fixed = detail::line_pair_frame(fb.fixed_axes[2], fb.fixed_axes[3]);
  const double line_tol = std::sqrt(tol.geometric);
  CongruentQuadPair out;
  double best_residual = std::numeric_limits<double>::max();
  bool found_alignment = false;
  std::string cut_error;
  for (const int s2 : {0, 1}) {
    LineAxis e2 = fb.everted_axes[2];
    if (s2) {
      e2.direction = -e2.direction;
      e2.moment = -e2.moment;
    }
    RigidMotion T;
    try {
      T = frame_fixed.compose(detail::line_pair_frame(e2, fb.everted_axes[3]).inverse());
    } catch (const DegenerateAxis&) {
      continue;
    }
    if (line_projective_distance(T.apply(fb.everted_axes[2]).unit(), fb.fixed_axes[2].unit()) > line_tol ||
        line_projective_distance(T.apply(fb.everted_axes[3]).unit(), fb.fixed_axes[3].unit()) > line_tol)
      continue;
    found_alignment = true;
    const Vec3 hi = T.apply(h_i), hj = T.apply(h_j);
    Vec3 g_k, g_l;
    try {
      g_k = bisector_cut(g_i, hi, fb.fixed_axes[2]);
      g_l = bisector_cut(g_j, hj, fb.fixed_axes[3]);
    } catch (const Error& e) {
      cut_error = e.what();
      continue;
    }
    double worst = 0;
    const std::array<Vec3, 4> quad{g_i, g_j, g_k, g_l};
    const std::array<Vec3, 4> quadp{hi, hj, g_k, g_l};
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        worst = std::max(worst, std::abs((quad[a] - quad[b]).norm() - (quadp[a] - quadp[b]).norm()));
    if (worst < best_residual) {
      best_residual = worst;
      out.fixed_quad = quad;
      out.everted_quad = quadp;
      out.residual = worst;
    }
    if (worst <= std::sqrt(tol.geometric) * scale) break;
  }
  if (!found_alignment)
    throw NotCongruent("congruent_quad_on_axes: everted axes 2,3 cannot be aligned with the fixed pair");
  if (out.residual > std::sqrt(tol.geometric) * scale) {
    if (!cut_error.empty() && best_residual == std::numeric_limits<double>::max())
      throw ParallelPlaneAxis(cut_error);
    throw NotCongruent("congruent_quad_on_axes: construction failed to produce congruent quads");
  }
  const auto [motion, direct_res] =
      fit_rigid({out.fixed_quad.begin(), out.fixed_quad.end()},
                {out.everted_quad.begin(), out.everted_quad.end()});
  out.direct = direct_res <= std::sqrt(tol.geometric) * scale;
  return out;
}

struct PropagatedSurfaces {
  QuadNet3 g;  // fixed surface
  QuadNet3 h;  // moving surface
  int cells_used = 0;
  double max_revisit_disagreement = 0;
};

// Iterative reconstruction of a surface pair realizing the snapping net: seeds
// on the central black quad and along its two diagonals, then ring-by-ring
// completion of the white cells. The moving surface follows by transferring
// each vertex to the everted axis.
inline PropagatedSurfaces propagate_congruent_net(const SnappingNet& net, const GridIndex& central_link,
                                                  const std::array<Vec3, 4>& central_quad,
                                                  const std::map<GridIndex, Vec3>& diagonal_seed,
                                                  const Tolerances& tol = default_tolerances()) {
  if (!net.links.count(central_link))
    throw std::invalid_argument("propagate_congruent_net: central face must be a link (black face)");
  std::map<GridIndex, Vec3> g;
  const SnapLink& cl = net.links.at(central_link);
  for (int k = 0; k < 4; ++k) g[cl.corners[k]] = central_quad[k];
  for (const auto& [idx, v] : diagonal_seed) g[idx] = v;

  PropagatedSurfaces out;

  // ring-by-ring sweep over cells, ordered by Chebyshev distance to the center
  std::vector<std::pair<int, GridIndex>> order;
  for (const auto& [ci, cell] : net.cells) {
    const int d = std::max(std::abs(ci.first - central_link.first), std::abs(ci.second - central_link.second));
    order.push_back({d, ci});
  }
  std::sort(order.begin(), order.end());

  bool progress = true;
  std::set<GridIndex> done;
  while (progress) {
    progress = false;
    for (const auto& [dist, ci] : order) {
      if (done.count(ci)) continue;
      const SnapCell& cell = net.cells.at(ci);
      int rot = -1;
      for (int k = 0; k < 4; ++k) {
        const bool ki = g.count(cell.corners[k]), kj = g.count(cell.corners[(k + 1) % 4]);
        if (ki && kj) {
          rot = k;
          break;
        }
      }
      if (rot < 0) continue;
      FourBar fb;
      for (int k = 0; k < 4; ++k) {
        const SnapAxis& ax = net.axes.at(cell.corners[(rot + k) % 4]);
        fb.fixed_axes[k] = ax.fixed;
        fb.everted_axes[k] = ax.everted;
      }
      const Vec3 gi = g.at(cell.corners[rot]);
      const Vec3 gj = g.at(cell.corners[(rot + 1) % 4]);
      const CongruentQuadPair pair = congruent_quad_on_axes(fb, gi, gj, tol);
      const GridIndex ck = cell.corners[(rot + 2) % 4], clx = cell.corners[(rot + 3) % 4];
      const double scale = std::max(1.0, (gi - gj).norm());
      for (const auto& [key, val] : {std::pair{ck, pair.fixed_quad[2]}, std::pair{clx, pair.fixed_quad[3]}}) {
        auto it = g.find(key);
        if (it == g.end()) {
          g[key] = val;
        } else {
          const double dis = (it->second - val).norm() / scale;
          out.max_revisit_disagreement = std::max(out.max_revisit_disagreement, dis);
          if (dis > std::sqrt(tol.geometric) * 10)
            throw InconsistentDual("propagate_congruent_net: revisited vertex disagrees");
        }
      }
      done.insert(ci);
      ++out.cells_used;
      progress = true;
    }
  }

  // moving surface on the axis-covered vertices
  std::map<GridIndex, Vec3> h;
  for (const auto& [s, ax] : net.axes) {
    if (!g.count(s)) continue;
    // reference mate: the cyclic successor in the lowest link containing s
    const GridIndex candidates[4] = {GridIndex{s.first - 1, s.second - 1},
                                     {s.first - 1, s.second},
                                     {s.first, s.second - 1},
                                     {s.first, s.second}};
    std::optional<GridIndex> mate;
    for (const auto& li : candidates) {
      auto it = net.links.find(li);
      if (it == net.links.end()) continue;
      for (int k = 0; k < 4; ++k)
        if (it->second.corners[k] == s) {
          const GridIndex nb = it->second.corners[(k + 1) % 4];
          if (net.axes.count(nb)) mate = nb;
        }
      if (mate) break;
    }
    if (!mate) continue;
    const SnapAxis& axm = net.axes.at(*mate);
    const auto ffeet = detail::common_normal_feet(ax.fixed, axm.fixed);
    const auto efeet = detail::common_normal_feet(ax.everted, axm.everted);
    h[s] = detail::transfer_point_between_axes(g.at(s), ax.fixed, ffeet.on_a, ax.everted, efeet.on_a);
  }

  // complete the moving surface across rigid link faces: a black face with
  // three known moving corners determines the fourth
  bool more = true;
  while (more) {
    more = false;
    for (const auto& [li, link] : net.links) {
      int missing = -1, have = 0;
      for (int k = 0; k < 4; ++k) {
        if (!g.count(link.corners[k])) {
          have = -10;
          break;
        }
        if (h.count(link.corners[k]))
          ++have;
        else
          missing = k;
      }
      if (have != 3 || missing < 0) continue;
      std::vector<Vec3> src, dst;
      for (int k = 0; k < 4; ++k) {
        if (k == missing) continue;
        src.push_back(g.at(link.corners[k]));
        dst.push_back(h.at(link.corners[k]));
      }
      const auto [motion, res] = fit_rigid(src, dst);
      if (res > std::sqrt(tol.geometric) * 10) continue;
      h[link.corners[missing]] = motion.apply(g.at(link.corners[missing]));
      more = true;
    }
  }

  // pack the rectangle hull of the vertices covered by both surfaces
  int u0 = INT_MAX, u1 = INT_MIN, v0 = INT_MAX, v1 = INT_MIN;
  for (const auto& [s, v] : h) {
    u0 = std::min(u0, s.first);
    u1 = std::max(u1, s.first);
    v0 = std::min(v0, s.second);
    v1 = std::max(v1, s.second);
  }
  if (u0 > u1 || v0 > v1) throw ConstructionFailed("propagate_congruent_net: nothing reconstructed");
  // shrink until fully filled
  auto filled = [&](int a0, int a1, int b0, int b1) {
    for (int uu = a0; uu <= a1; ++uu)
      for (int vv = b0; vv <= b1; ++vv)
        if (!g.count({uu, vv}) || !h.count({uu, vv})) return false;
    return true;
  };
  while (u0 <= u1 && v0 <= v1 && !filled(u0, u1, v0, v1)) {
    // trim the side with the most holes
    int best_side = 0, best_holes = -1;
    auto holes = [&](int side) {
      int cnt = 0;
      if (side == 0)
        for (int vv = v0; vv <= v1; ++vv) cnt += !g.count({u0, vv}) || !h.count({u0, vv});
      if (side == 1)
        for (int vv = v0; vv <= v1; ++vv) cnt += !g.count({u1, vv}) || !h.count({u1, vv});
      if (side == 2)
        for (int uu = u0; uu <= u1; ++uu) cnt += !g.count({uu, v0}) || !h.count({uu, v0});
      if (side == 3)
        for (int uu = u0; uu <= u1; ++uu) cnt += !g.count({uu, v1}) || !h.count({uu, v1});
      return cnt;
    };
    for (int side = 0; side < 4; ++side)
      if (holes(side) > best_holes) {
        best_holes = holes(side);
        best_side = side;
      }
    if (best_side == 0) ++u0;
    if (best_side == 1) --u1;
    if (best_side == 2) ++v0;
    if (best_side == 3) --v1;
  }
  if (u0 > u1 || v0 > v1) throw ConstructionFailed("propagate_congruent_net: no filled rectangle");
  const Window2 wnd{u0, u1, v0, v1};
  out.g = QuadNet3(wnd);
  out.h = QuadNet3(wnd);
  for (int uu = u0; uu <= u1; ++uu)
    for (int vv = v0; vv <= v1; ++vv) {
      out.g.at(uu, vv) = g.at({uu, vv});
      out.h.at(uu, vv) = h.at({uu, vv});
    }
  return out;
}

}  // namespace snapnet
