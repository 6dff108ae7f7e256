// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "snapnet/dh.hpp"
#include "snapnet/dualquat.hpp"
#include "snapnet/line_axis.hpp"

namespace snapnet {

using MultiIndex = std::vector<int>;

inline std::string index_to_string(const MultiIndex& idx) {
  std::string s;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(idx[k]);
  }
  return s;
}

// Per-axis inclusive index ranges of a finite net window.
struct NetWindow {
  std::vector<std::pair<int, int>> ranges;

  int dim() const { return static_cast<int>(ranges.size()); }

  bool contains(const MultiIndex& idx) const {
    if (idx.size() != ranges.size()) return false;
    for (std::size_t k = 0; k < ranges.size(); ++k)
      if (idx[k] < ranges[k].first || idx[k] > ranges[k].second) return false;
    return true;
  }

  std::vector<MultiIndex> all_indices() const {
    std::vector<MultiIndex> out;
    MultiIndex cur(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) cur[k] = ranges[k].first;
    while (true) {
      out.push_back(cur);
      int k = static_cast<int>(ranges.size()) - 1;
      while (k >= 0) {
        if (++cur[k] <= ranges[k].second) break;
        cur[k] = ranges[k].first;
        --k;
      }
      if (k < 0) break;
    }
    return out;
  }
};

// Quad net in the Study quadric: vertices are poses, edges carry rotations.
struct SNet {
  int dim = 0;
  NetWindow window;
  std::map<MultiIndex, DualQuaternion> vertices;

  std::vector<std::pair<MultiIndex, MultiIndex>> edges() const {
    std::vector<std::pair<MultiIndex, MultiIndex>> out;
    for (const auto& [idx, p] : vertices) {
      for (int k = 0; k < dim; ++k) {
        MultiIndex j = idx;
        ++j[k];
        if (vertices.count(j)) out.emplace_back(idx, j);
      }
    }
    return out;
  }
};

struct SNetResiduals {
  double max_study = 0;
  double max_edge = 0;
};

inline SNetResiduals snet_residuals(const SNet& net) {
  SNetResiduals r;
  for (const auto& [idx, p] : net.vertices)
    r.max_study = std::max(r.max_study, study_residual(dq_normalized(p)));
  for (const auto& [i, j] : net.edges())
    r.max_edge = std::max(r.max_edge, std::abs(bilinear_form(dq_normalized(net.vertices.at(i)),
                                                             dq_normalized(net.vertices.at(j)))));
  return r;
}

enum class QuadraticBranch { plus, minus };

namespace detail {

inline Eigen::Matrix<double, 8, 1> dq_to_vec8(const DualQuaternion& p) {
  Eigen::Matrix<double, 8, 1> v;
  const auto c = p.coords();
  for (int i = 0; i < 8; ++i) v[i] = c[i];
  return v;
}

inline DualQuaternion vec8_to_dq(const Eigen::Matrix<double, 8, 1>& v) {
  std::array<double, 8> c;
  for (int i = 0; i < 8; ++i) c[i] = v[i];
  return DualQuaternion::from_coords(c);
}

// s(x,y) as <x, S y> with the antidiagonal block matrix S.
inline Eigen::Matrix<double, 8, 1> study_pair(const Eigen::Matrix<double, 8, 1>& v) {
  Eigen::Matrix<double, 8, 1> w;
  w << v.segment<4>(4), v.segment<4>(0);
  return w;
}

}  // namespace detail

// Random pose on the Study quadric (uniform gaussian primal, dual projected
// onto the orthogonal complement of the primal part).
inline DualQuaternion random_study_pose(Rng& rng) {
  Eigen::Matrix<double, 8, 1> v;
  for (int i = 0; i < 8; ++i) v[i] = gauss(rng);
  Eigen::Vector4d a = v.segment<4>(0), c = v.segment<4>(4);
  c -= a * (a.dot(c) / a.squaredNorm());
  v << a, c;
  return dq_normalized(detail::vec8_to_dq(v));
}

// Extends a partial S-net: returns p with s(p,p) = 0 and s(p,k) = 0 for every
// known k. The linear solution space is sampled with the seeded generator and
// the restricted quadratic is solved; `branch` picks the root. Deterministic
// for a fixed (known, seed, branch) triple.
inline DualQuaternion snet_extend(const std::vector<DualQuaternion>& known, std::uint64_t seed,
                                  QuadraticBranch branch = QuadraticBranch::plus) {
  if (known.empty() || known.size() > 6)
    throw std::invalid_argument("snet_extend: need 1..6 known vertices (conditions exceed dimension)");
  Eigen::MatrixXd K(known.size(), 8);
  for (std::size_t r = 0; r < known.size(); ++r)
    K.row(r) = detail::study_pair(detail::dq_to_vec8(dq_normalized(known[r]))).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-12 * sv[0]) ++rank;
  const int null_dim = 8 - rank;
  if (null_dim < 2) throw RankDeficient("snet_extend: solution space degenerated");
  const Eigen::MatrixXd N = svd.matrixV().rightCols(null_dim);

  Rng rng(seed);
  const double sgn = branch == QuadraticBranch::plus ? 1.0 : -1.0;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::VectorXd c1(null_dim), c2(null_dim);
    for (int i = 0; i < null_dim; ++i) c1[i] = gauss(rng);
    for (int i = 0; i < null_dim; ++i) c2[i] = gauss(rng);
    c1.normalize();
    c2.normalize();
    const Eigen::Matrix<double, 8, 1> x0 = N * c1, x1 = N * c2;
    const double qa = x1.dot(detail::study_pair(x1));
    const double qb = 2.0 * x0.dot(detail::study_pair(x1));
    const double qc = x0.dot(detail::study_pair(x0));
    double lambda;
    if (std::abs(qa) < 1e-14) {
      if (std::abs(qb) < 1e-14) continue;
      lambda = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0) continue;
      lambda = (-qb + sgn * std::sqrt(disc)) / (2.0 * qa);
    }
    const Eigen::Matrix<double, 8, 1> pv = x0 + lambda * x1;
    if (pv.cwiseAbs().maxCoeff() < 1e-9) continue;
    DualQuaternion p = dq_normalized(detail::vec8_to_dq(pv));
    if (p.primal.norm() < 1e-9) continue;  // poses with a = 0 are excluded
    return p;
  }
  throw NoRealSolution("snet_extend: no real root found after 16 attempts");
}

// Builds a full S-net on the window (which must contain the origin), sweeping
// outward by l1-distance as in the axis/coordinate-plane construction.
inline SNet snet_build(int dim, const NetWindow& window, std::uint64_t seed) {
  if (dim < 1 || dim > 6) throw std::invalid_argument("snet_build: dim must be in 1..6");
  if (window.dim() != dim) throw std::invalid_argument("snet_build: window rank mismatch");
  const MultiIndex origin(dim, 0);
  if (!window.contains(origin)) throw std::invalid_argument("snet_build: window must contain the origin");

  SNet net;
  net.dim = dim;
  net.window = window;

  auto order = window.all_indices();
  std::sort(order.begin(), order.end(), [](const MultiIndex& a, const MultiIndex& b) {
    auto l1 = [](const MultiIndex& v) {
      return std::accumulate(v.begin(), v.end(), 0, [](int s, int x) { return s + std::abs(x); });
    };
    const int la = l1(a), lb = l1(b);
    if (la != lb) return la < lb;
    return a < b;
  });

  for (std::size_t vi = 0; vi < order.size(); ++vi) {
    const MultiIndex& idx = order[vi];
    std::vector<DualQuaternion> known;
    for (int k = 0; k < dim; ++k) {
      if (idx[k] == 0) continue;
      MultiIndex nb = idx;
      nb[k] -= idx[k] > 0 ? 1 : -1;
      auto it = net.vertices.find(nb);
      if (it != net.vertices.end()) known.push_back(it->second);
    }
    bool done = false;
    for (int attempt = 0; attempt < 16 && !done; ++attempt) {
      const std::uint64_t sub = mix_seed(seed, mix_seed(vi, attempt));
      try {
        if (known.empty()) {
          Rng rng(sub);
          net.vertices[idx] = random_study_pose(rng);
        } else {
          net.vertices[idx] = snet_extend(known, sub);
        }
        done = true;
      } catch (const NoRealSolution&) {
      }
    }
    if (!done)
      throw ConstructionFailed("snet_build: no real solution at vertex (" + index_to_string(idx) + ")");
  }
  return net;
}

// Edge-wise relative rotations r_ij = p_j conj(p_i) of an S-net, keyed by the
// directed edge (tail index, axis).
struct RotationNet {
  int dim = 0;
  NetWindow window;
  std::map<std::pair<MultiIndex, int>, DualQuaternion> edges;

  const DualQuaternion& edge(const MultiIndex& tail, int axis) const { return edges.at({tail, axis}); }
};

inline RotationNet rotation_net(const SNet& net, const Tolerances& tol = default_tolerances()) {
  RotationNet rn;
  rn.dim = net.dim;
  rn.window = net.window;
  for (const auto& [i, j] : net.edges()) {
    int axis = 0;
    for (int k = 0; k < net.dim; ++k)
      if (j[k] != i[k]) axis = k;
    DualQuaternion r = net.vertices.at(j) * dq_conjugate(net.vertices.at(i));
    if (!is_rotation(r, tol))
      throw NotARotation("rotation_net: edge (" + index_to_string(i) + ")->(" + index_to_string(j) +
                         ") is not a rotation");
    rn.edges[{i, axis}] = r;
  }
  return rn;
}

// Four rotations whose composition is the identity (projectively).
struct RotationQuadrilateral {
  std::array<DualQuaternion, 4> rotations;
};

// Norm of the non-real coordinates of rho3 rho2 rho1 rho0 after max-coordinate
// normalization; zero iff the cyclic product is a nonzero real scalar.
inline double face_closure_residual(const RotationQuadrilateral& q) {
  DualQuaternion prod = DualQuaternion::identity();
  for (int k = 0; k < 4; ++k) prod = q.rotations[k] * prod;
  prod = dq_normalized(prod);
  const auto c = prod.coords();
  double s = 0;
  for (int i = 1; i < 8; ++i) s += c[i] * c[i];
  return std::sqrt(s);
}

// Rotations around a face of a 2-dimensional rotation net, ordered
// (i->j, j->k, k->l, l->i) for the face with lower-left tail index.
inline RotationQuadrilateral face_quadrilateral(const RotationNet& rn, const MultiIndex& lower_left,
                                                int axis_a = 0, int axis_b = 1) {
  MultiIndex i = lower_left;
  MultiIndex j = i;
  ++j[axis_a];
  MultiIndex l = i;
  ++l[axis_b];
  RotationQuadrilateral q;
  q.rotations[0] = rn.edge(i, axis_a);
  q.rotations[1] = rn.edge(j, axis_b);
  // edges k->l and l->i traverse the axes backwards: conjugation inverts
  q.rotations[2] = dq_conjugate(rn.edge(l, axis_a));
  q.rotations[3] = dq_conjugate(rn.edge(i, axis_b));
  return q;
}

// A snapping four-bar: two incongruent axis configurations with equal DH data.
struct FourBar {
  std::array<LineAxis, 4> fixed_axes;
  std::array<LineAxis, 4> everted_axes;
  std::array<DHParams, 4> dh;
};

// Recovers the four-bar of a rotation quadrilateral. The fixed configuration
// consists of the rotation axes; the everted one is the moving axode placed so
// that axes 0 and 1 coincide with their fixed counterparts:
//   Q0 = R0, Q1 = R1, Q2 = image of R2 under conj(r1), Q3 = image of R3 under r0.
inline FourBar fourbar_from_face(const RotationQuadrilateral& q,
                                 const Tolerances& tol = default_tolerances()) {
  if (face_closure_residual(q) > std::sqrt(tol.algebraic))
    throw ClosureFailed("fourbar_from_face: rotations do not compose to the identity");
  FourBar fb;
  for (int k = 0; k < 4; ++k) fb.fixed_axes[k] = rotation_axis(q.rotations[k], tol);
  fb.everted_axes[0] = fb.fixed_axes[0];
  fb.everted_axes[1] = fb.fixed_axes[1];
  fb.everted_axes[2] = act_on_line(dq_conjugate(q.rotations[1]), fb.fixed_axes[2], tol);
  fb.everted_axes[3] = act_on_line(q.rotations[0], fb.fixed_axes[3], tol);

  const double scale_tol = std::sqrt(tol.geometric);
  for (int k = 0; k < 4; ++k)
    if (same_line(fb.fixed_axes[k], fb.fixed_axes[(k + 1) % 4], scale_tol))
      throw DegenerateFace("fourbar_from_face: consecutive axes coincide");
  bool all_same = true;
  for (int k = 0; k < 4; ++k)
    all_same = all_same && same_line(fb.fixed_axes[k], fb.everted_axes[k], scale_tol);
  if (all_same) throw DegenerateFace("fourbar_from_face: configurations coincide axis-by-axis");

  fb.dh = dh_cycle(fb.fixed_axes, tol);
  return fb;
}

}  // namespace snapnet
