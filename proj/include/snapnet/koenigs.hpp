// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>

#include "snapnet/quadnet.hpp"

namespace snapnet {

struct KoenigsReport {
  double max_edge_parallel = 0;   // (K1)
  double max_diag_parallel = 0;   // (K2)
  double max_face_planarity = 0;

  bool pass(double tol) const {
    return max_edge_parallel <= tol && max_diag_parallel <= tol && max_face_planarity <= tol;
  }
};

namespace detail {

inline double parallel_residual(const Vec3& u, const Vec3& v) {
  const double s = u.norm() * v.norm();
  if (s == 0) return 0;
  return u.cross(v).norm() / s;
}

}  // namespace detail

// Diagnostic of the Koenigs conditions: corresponding edges parallel (K1) and
// non-corresponding face diagonals parallel (K2), plus face planarity of f.
inline KoenigsReport koenigs_check(const QuadNet3& f, const QuadNet3& fstar) {
  if (!(f.window == fstar.window)) throw std::invalid_argument("koenigs_check: windows differ");
  KoenigsReport rep;
  const Window2& w = f.window;
  for (int m = w.m0; m <= w.m1; ++m) {
    for (int n = w.n0; n <= w.n1; ++n) {
      if (m < w.m1)
        rep.max_edge_parallel = std::max(
            rep.max_edge_parallel,
            detail::parallel_residual(f.at(m + 1, n) - f.at(m, n), fstar.at(m + 1, n) - fstar.at(m, n)));
      if (n < w.n1)
        rep.max_edge_parallel = std::max(
            rep.max_edge_parallel,
            detail::parallel_residual(f.at(m, n + 1) - f.at(m, n), fstar.at(m, n + 1) - fstar.at(m, n)));
      if (m < w.m1 && n < w.n1) {
        const Vec3 fi = f.at(m, n), fj = f.at(m + 1, n), fk = f.at(m + 1, n + 1), fl = f.at(m, n + 1);
        const Vec3 si = fstar.at(m, n), sj = fstar.at(m + 1, n), sk = fstar.at(m + 1, n + 1),
                   sl = fstar.at(m, n + 1);
        rep.max_diag_parallel =
            std::max(rep.max_diag_parallel, detail::parallel_residual(fk - fi, sl - sj));
        rep.max_diag_parallel =
            std::max(rep.max_diag_parallel, detail::parallel_residual(fl - fj, sk - si));
        const Vec3 e1 = fj - fi, e2 = fl - fi, e3 = fk - fi;
        const double vol = std::abs(e1.cross(e2).dot(e3));
        const double scale = e1.norm() * e2.norm() * e3.norm();
        if (scale > 0) rep.max_face_planarity = std::max(rep.max_face_planarity, vol / scale);
      }
    }
  }
  return rep;
}

namespace detail {

// Closest-approach midpoint of two lines; gap measures how far they are from
// actually meeting.
inline std::pair<Vec3, double> line_meet(const Vec3& p1, Vec3 u1, const Vec3& p2, Vec3 u2) {
  u1.normalize();
  u2.normalize();
  const Vec3 w0 = p1 - p2;
  const double b = u1.dot(u2);
  const double den = 1.0 - b * b;
  if (den < 1e-22) return {Vec3::Zero(), std::numeric_limits<double>::infinity()};
  const double d = u1.dot(w0), e = u2.dot(w0);
  const double s = (b * e - d) / den;
  const double t = (e - b * d) / den;
  const Vec3 A = p1 + s * u1, B = p2 + t * u2;
  return {0.5 * (A + B), (A - B).norm()};
}

}  // namespace detail

// Reconstructs the Koenigs companion of fstar from one seeded edge: the two
// values must satisfy f_i - f_j parallel to the dual edge. All other vertices
// follow by intersecting edge lines with diagonal lines; disagreements between
// alternative computation paths are rejected.
inline QuadNet3 koenigs_dual_reconstruct(const QuadNet3& fstar, const Vec3& f_i, const Vec3& f_j,
                                         std::pair<int, int> vi, std::pair<int, int> vj,
                                         const Tolerances& tol = default_tolerances()) {
  const Window2& w = fstar.window;
  if (!w.contains(vi.first, vi.second) || !w.contains(vj.first, vj.second))
    throw IndexOutOfWindow("koenigs_dual_reconstruct: seed edge outside window");
  const int dm = vj.first - vi.first, dn = vj.second - vi.second;
  if (std::abs(dm) + std::abs(dn) != 1)
    throw std::invalid_argument("koenigs_dual_reconstruct: seed vertices are not edge-adjacent");
  const Vec3 dual_edge = fstar.at(vj.first, vj.second) - fstar.at(vi.first, vi.second);
  if (detail::parallel_residual(f_j - f_i, dual_edge) > std::sqrt(tol.geometric))
    throw NonParallelSeed("koenigs_dual_reconstruct: seed edge not parallel to the dual edge");

  std::map<std::pair<int, int>, Vec3> f;
  f[vi] = f_i;
  f[vj] = f_j;
  const double scale = std::max(1.0, std::max(f_i.norm(), f_j.norm()) + (f_j - f_i).norm());
  const double gap_tol = std::sqrt(tol.geometric) * scale;

  auto fs = [&](int m, int n) { return fstar.at(m, n); };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int m = w.m0; m < w.m1; ++m) {
      for (int n = w.n0; n < w.n1; ++n) {
        const std::pair<int, int> c[4] = {{m, n}, {m + 1, n}, {m + 1, n + 1}, {m, n + 1}};
        int known = 0;
        for (const auto& x : c) known += f.count(x) ? 1 : 0;
        if (known < 2 || known == 4) continue;
        for (int rot = 0; rot < 4; ++rot) {
          const auto i = c[rot], j = c[(rot + 1) % 4], k = c[(rot + 2) % 4], l = c[(rot + 3) % 4];
          if (!f.count(i) || !f.count(j) || f.count(k) || f.count(l)) continue;
          const Vec3 si = fs(i.first, i.second), sj = fs(j.first, j.second), sk = fs(k.first, k.second),
                     sl = fs(l.first, l.second);
          // f_k: edge line through f_j (dir s_k - s_j), diagonal line through
          // f_i (dir s_l - s_j, the non-corresponding dual diagonal).
          auto [pk, gk] = detail::line_meet(f[j], sk - sj, f[i], sl - sj);
          auto [pl, gl] = detail::line_meet(f[i], sl - si, f[j], sk - si);
          if (gk > gap_tol || gl > gap_tol)
            throw InconsistentDual("koenigs_dual_reconstruct: edge/diagonal lines fail to meet");
          f[k] = pk;
          f[l] = pl;
          changed = true;
          break;
        }
        if (changed) continue;
        // three known corners: fill the fourth and cross-check
        for (int rot = 0; rot < 4; ++rot) {
          const auto miss = c[rot];
          if (f.count(miss)) continue;
          const auto prev = c[(rot + 3) % 4], opp = c[(rot + 2) % 4], next = c[(rot + 1) % 4];
          if (!f.count(prev) || !f.count(opp) || !f.count(next)) continue;
          const Vec3 sm = fs(miss.first, miss.second), sp = fs(prev.first, prev.second),
                     so = fs(opp.first, opp.second), sn = fs(next.first, next.second);
          auto [p, g] = detail::line_meet(f[prev], sm - sp, f[next], sm - sn);
          if (g > gap_tol) throw InconsistentDual("koenigs_dual_reconstruct: inconsistent face completion");
          // diagonal consistency: f diag (miss, opp) vs dual diag (prev, next)
          if (detail::parallel_residual(p - f[opp], sn - sp) > std::sqrt(tol.geometric))
            throw InconsistentDual("koenigs_dual_reconstruct: diagonal check failed");
          f[miss] = p;
          changed = true;
          break;
        }
      }
    }
  }
  if (f.size() != static_cast<std::size_t>(w.count()))
    throw InconsistentDual("koenigs_dual_reconstruct: window not fully reachable from the seed edge");
  QuadNet3 out(w);
  for (const auto& [idx, v] : f) out.at(idx.first, idx.second) = v;
  return out;
}

// Velocity field of the infinitesimal isometric deformation determined by the
// dual: q_j - q_i = fstar_i x (f_j - f_i), anchored at the window origin.
inline VelocityField iid_from_dual(const QuadNet3& f, const QuadNet3& fstar,
                                   const Vec3& q0 = Vec3(0, 0, 1),
                                   const Tolerances& tol = default_tolerances()) {
  if (!(f.window == fstar.window)) throw std::invalid_argument("iid_from_dual: windows differ");
  const Window2& w = f.window;
  const int am = w.contains(0, 0) ? 0 : w.m0;
  const int an = w.contains(0, 0) ? 0 : w.n0;
  VelocityField q(w);
  std::vector<char> seen(w.count(), 0);
  std::deque<std::pair<int, int>> todo;
  q.at(am, an) = q0;
  seen[w.offset(am, an)] = 1;
  todo.push_back({am, an});
  while (!todo.empty()) {
    auto [m, n] = todo.front();
    todo.pop_front();
    const int dm[4] = {1, -1, 0, 0}, dn[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int m2 = m + dm[k], n2 = n + dn[k];
      if (!w.contains(m2, n2) || seen[w.offset(m2, n2)]) continue;
      q.at(m2, n2) = q.at(m, n) + fstar.at(m, n).cross(f.at(m2, n2) - f.at(m, n));
      seen[w.offset(m2, n2)] = 1;
      todo.push_back({m2, n2});
    }
  }
  // well-definedness around faces: every edge must satisfy the formula
  const double scale = std::max(1.0, f.max_edge_length() * fstar.max_edge_length());
  double worst = 0;
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      if (m < w.m1)
        worst = std::max(worst, (q.at(m + 1, n) - q.at(m, n) -
                                 fstar.at(m, n).cross(f.at(m + 1, n) - f.at(m, n)))
                                    .norm());
      if (n < w.n1)
        worst = std::max(worst, (q.at(m, n + 1) - q.at(m, n) -
                                 fstar.at(m, n).cross(f.at(m, n + 1) - f.at(m, n)))
                                    .norm());
    }
  if (worst > std::sqrt(tol.geometric) * scale)
    throw NotKoenigs("iid_from_dual: velocity field does not close around faces");
  return q;
}

// Whiteley de-averaging f^{+-t} = f +- t q.
inline std::pair<QuadNet3, QuadNet3> deaverage(const QuadNet3& f, const VelocityField& q, double t,
                                               const Tolerances& tol = default_tolerances()) {
  if (!(f.window == q.window)) throw std::invalid_argument("deaverage: windows differ");
  // orthogonality precondition
  const Window2& w = f.window;
  double scale = 0, worst = 0;
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      if (m < w.m1) {
        const Vec3 e = f.at(m + 1, n) - f.at(m, n), dq = q.at(m + 1, n) - q.at(m, n);
        worst = std::max(worst, std::abs(e.dot(dq)));
        scale = std::max(scale, e.norm() * dq.norm());
      }
      if (n < w.n1) {
        const Vec3 e = f.at(m, n + 1) - f.at(m, n), dq = q.at(m, n + 1) - q.at(m, n);
        worst = std::max(worst, std::abs(e.dot(dq)));
        scale = std::max(scale, e.norm() * dq.norm());
      }
    }
  if (worst > std::sqrt(tol.geometric) * std::max(1.0, scale))
    throw std::invalid_argument("deaverage: (f, q) is not an infinitesimal isometric pair");
  QuadNet3 fp = f, fm = f;
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      fp.at(m, n) += t * q.at(m, n);
      fm.at(m, n) -= t * q.at(m, n);
    }
  return {fp, fm};
}

// Whiteley averaging: f = (f+ + f-)/2, q = (f+ - f-)/2.
inline std::pair<QuadNet3, VelocityField> average(const QuadNet3& fp, const QuadNet3& fm,
                                                  const Tolerances& tol = default_tolerances()) {
  if (!(fp.window == fm.window)) throw std::invalid_argument("average: windows differ");
  const Window2& w = fp.window;
  double scale = std::max(fp.max_edge_length(), fm.max_edge_length());
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      if (m < w.m1 &&
          std::abs((fp.at(m + 1, n) - fp.at(m, n)).norm() - (fm.at(m + 1, n) - fm.at(m, n)).norm()) >
              std::sqrt(tol.geometric) * std::max(1.0, scale))
        throw NotIsometric("average: inputs are not edge-isometric");
      if (n < w.n1 &&
          std::abs((fp.at(m, n + 1) - fp.at(m, n)).norm() - (fm.at(m, n + 1) - fm.at(m, n)).norm()) >
              std::sqrt(tol.geometric) * std::max(1.0, scale))
        throw NotIsometric("average: inputs are not edge-isometric");
    }
  QuadNet3 f(w);
  VelocityField q(w);
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      f.at(m, n) = 0.5 * (fp.at(m, n) + fm.at(m, n));
      q.at(m, n) = 0.5 * (fp.at(m, n) - fm.at(m, n));
    }
  return {f, q};
}

enum class IsometryMode { edge, face, star };

// Worst deviation from edge/face/star isometry between two nets on the same
// window. Face and star modes fit a direct congruence (det +1) per item.
inline double isometry_report(const QuadNet3& a, const QuadNet3& b, IsometryMode mode) {
  if (!(a.window == b.window)) throw std::invalid_argument("isometry_report: windows differ");
  const Window2& w = a.window;
  double worst = 0;
  if (mode == IsometryMode::edge) {
    for (int m = w.m0; m <= w.m1; ++m)
      for (int n = w.n0; n <= w.n1; ++n) {
        if (m < w.m1)
          worst = std::max(worst, std::abs((a.at(m + 1, n) - a.at(m, n)).norm() -
                                           (b.at(m + 1, n) - b.at(m, n)).norm()));
        if (n < w.n1)
          worst = std::max(worst, std::abs((a.at(m, n + 1) - a.at(m, n)).norm() -
                                           (b.at(m, n + 1) - b.at(m, n)).norm()));
      }
    return worst;
  }
  if (mode == IsometryMode::face) {
    for (int m = w.m0; m < w.m1; ++m)
      for (int n = w.n0; n < w.n1; ++n) {
        const std::vector<Vec3> src{a.at(m, n), a.at(m + 1, n), a.at(m + 1, n + 1), a.at(m, n + 1)};
        const std::vector<Vec3> dst{b.at(m, n), b.at(m + 1, n), b.at(m + 1, n + 1), b.at(m, n + 1)};
        worst = std::max(worst, fit_rigid(src, dst).second);
      }
    return worst;
  }
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      std::vector<Vec3> src{a.at(m, n)}, dst{b.at(m, n)};
      const int dm[4] = {1, -1, 0, 0}, dn[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k)
        if (w.contains(m + dm[k], n + dn[k])) {
          src.push_back(a.at(m + dm[k], n + dn[k]));
          dst.push_back(b.at(m + dm[k], n + dn[k]));
        }
      if (src.size() < 3) continue;
      worst = std::max(worst, fit_rigid(src, dst).second);
    }
  return worst;
}

// Diagonal net built on the even-parity (black) vertices; faces correspond to
// the vertex stars with odd-parity (white) centers. Vertex (U,V) of the
// diagonal lattice is f(U-V, U+V); the face with lower-left (U,V) comes from
// the star at (U-V, U+V+1) and carries the checkerboard color black iff U+V
// is even (equivalently: iff the star center's first index is even).
struct ColoredNet {
  QuadNet3 net;  // window in diagonal lattice coordinates (U,V)

  static std::pair<int, int> source_vertex(int U, int V) { return {U - V, U + V}; }
  static std::pair<int, int> face_center(int U, int V) { return {U - V, U + V + 1}; }
  static bool face_black(int U, int V) { return ((U + V) % 2 + 2) % 2 == 0; }
};

inline ColoredNet diagonal_net(const QuadNet3& f) {
  const Window2& w = f.window;
  // feasible diagonal rectangles [ua,ub]x[va,vb]: all four corners must map
  // into the source window; pick the one with most vertices.
  const int lo = std::min(w.m0, w.n0) - std::abs(w.m1) - std::abs(w.n1) - 2;
  const int hi = std::max(w.m1, w.n1) + std::abs(w.m0) + std::abs(w.n0) + 2;
  auto feasible = [&](int ua, int ub, int va, int vb) {
    return ua - vb >= w.m0 && ub - va <= w.m1 && ua + va >= w.n0 && ub + vb <= w.n1;
  };
  int best_area = 0, bua = 0, bub = -1, bva = 0, bvb = -1;
  for (int ua = lo; ua <= hi; ++ua)
    for (int ub = ua; ub <= hi; ++ub) {
      if (!feasible(ua, ub, lo, lo)) {
        // quick reject needs a valid v; scan v anyway
      }
      for (int va = lo; va <= hi; ++va) {
        if (!feasible(ua, ub, va, va)) continue;
        int vb = va;
        while (feasible(ua, ub, va, vb + 1)) ++vb;
        const int area = (ub - ua + 1) * (vb - va + 1);
        if (area > best_area || (area == best_area && (ub - ua) > (bub - bua))) {
          best_area = area;
          bua = ua;
          bub = ub;
          bva = va;
          bvb = vb;
        }
      }
    }
  if (best_area < 4 || bub - bua < 1 || bvb - bva < 1)
    throw WindowTooSmall("diagonal_net: window does not contain a full white-centered star");
  ColoredNet out;
  out.net = QuadNet3(Window2{bua, bub, bva, bvb});
  for (int U = bua; U <= bub; ++U)
    for (int V = bva; V <= bvb; ++V) {
      const auto [m, n] = ColoredNet::source_vertex(U, V);
      out.net.at(U, V) = f.at(m, n);
    }
  return out;
}

}  // namespace snapnet
