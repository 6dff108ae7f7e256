// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "snapnet/classify.hpp"
#include "snapnet/rolling.hpp"

using namespace snapnet;

namespace {

QuadNet3 enneper_gauss_map(const Window2& w) {
  QuadNet3 fstar(w);
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      const double D = m * m + n * n + 16.0;
      fstar.at(m, n) = Vec3(16.0 * m, 16.0 * n, 4.0 * (m * m + n * n)) / D;
    }
  return fstar;
}

struct EnneperPipeline {
  QuadNet3 fstar, f;
  VelocityField q;
  QuadNet3 fp, fm;
  ColoredNet gp, gm;

  explicit EnneperPipeline(int half_width = 6, double t = 1.0)
      : fstar(enneper_gauss_map(Window2{-half_width, half_width, -half_width, half_width})) {
    f = koenigs_dual_reconstruct(fstar, Vec3(0, 0, 0), Vec3(16.0 / 123, 0, 4.0 / 123), {0, 0}, {1, 0});
    q = iid_from_dual(f, fstar);
    std::tie(fp, fm) = deaverage(f, q, t);
    gp = diagonal_net(fp);
    gm = diagonal_net(fm);
  }
};

}  // namespace

TEST_CASE("align_faces") {
  const std::array<Vec3, 4> quad{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1.2, 1, 0.3), Vec3(0, 1, 0.1)};
  // identity
  const RigidMotion ident = align_faces(quad, quad);
  CHECK((ident.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(ident.translation.norm() < 1e-12);

  // pure translation
  std::array<Vec3, 4> shifted = quad;
  for (auto& v : shifted) v += Vec3(1, 0, 0);
  const RigidMotion tr = align_faces(quad, shifted);
  CHECK((tr.rotation - Mat3::Identity()).norm() < 1e-10);
  CHECK((tr.translation - Vec3(1, 0, 0)).norm() < 1e-10);

  // recover a seeded rotation
  Rng rng(31);
  for (int it = 0; it < 10; ++it) {
    const Mat3 R = rotation_from_axis_angle(gauss_vec3(rng).normalized(), uniform(rng, 0.1, 3.0));
    const Vec3 t = gauss_vec3(rng);
    std::array<Vec3, 4> moved;
    for (int k = 0; k < 4; ++k) moved[k] = R * quad[k] + t;
    const RigidMotion m = align_faces(quad, moved);
    CHECK((m.rotation - R).norm() < 1e-10);
    CHECK((m.translation - t).norm() < 1e-10);
  }

  std::array<Vec3, 4> bent = quad;
  bent[2] += Vec3(0, 0, 0.5);
  CHECK_THROWS_AS(align_faces(quad, bent), NotCongruent);
}

TEST_CASE("rolling rotation basics") {
  const EnneperPipeline pipe(4);
  // t = 0 is the identity
  CHECK((rolling_rotation(pipe.fstar, 1, 1, RollDirection::axis1, 0.0) - Mat3::Identity()).norm() < 1e-15);
  CHECK(snap_angle(pipe.fstar, 1, 1, RollDirection::axis1, 0.0) < 1e-12);

  // equal neighbors give the identity for all t
  QuadNet3 constant(Window2{-1, 1, -1, 1});
  for (auto& v : constant.values) v = Vec3(0.3, 0.7, -0.2);
  CHECK((rolling_rotation(constant, 0, 0, RollDirection::axis2, 2.5) - Mat3::Identity()).norm() < 1e-14);
  CHECK(snap_angle(constant, 0, 0, RollDirection::axis2, 2.5) < 1e-12);
  CHECK_THROWS_AS(axis_direction(constant, 0, 0, RollDirection::axis1, 1.0), DegenerateAxis);

  CHECK_THROWS_AS(rolling_rotation(pipe.fstar, 4, 0, RollDirection::axis1, 1.0), IndexOutOfWindow);
}

TEST_CASE("snap angle and axis direction match the matrix") {
  Rng rng(47);
  double worst_angle = 0, worst_axis = 0;
  for (int it = 0; it < 1000; ++it) {
    QuadNet3 fs(Window2{-1, 1, 0, 0});
    fs.at(-1, 0) = gauss_vec3(rng);
    fs.at(0, 0) = gauss_vec3(rng);
    fs.at(1, 0) = gauss_vec3(rng);
    const double t = uniform(rng, 0.05, 2.0);
    const Mat3 R = rolling_rotation(fs, 0, 0, RollDirection::axis1, t);
    const double a_formula = snap_angle(fs, 0, 0, RollDirection::axis1, t);
    worst_angle = std::max(worst_angle, std::abs(a_formula - rotation_angle(R)));
    const Vec3 u = axis_direction(fs, 0, 0, RollDirection::axis1, t).normalized();
    const Vec3 e = rotation_axis_unit(R);
    worst_axis = std::max(worst_axis, std::atan2(u.cross(e).norm(), std::abs(u.dot(e))));
  }
  CHECK(worst_angle < 1e-10);
  CHECK(worst_axis < 1e-8);

  // antiparallel neighbors: the cross term vanishes
  QuadNet3 fs(Window2{-1, 1, 0, 0});
  fs.at(1, 0) = Vec3(0.4, -0.7, 1.1);
  fs.at(-1, 0) = -fs.at(1, 0);
  fs.at(0, 0) = Vec3::Zero();
  const Vec3 u = axis_direction(fs, 0, 0, RollDirection::axis1, 1.7);
  CHECK((u - 2.0 * fs.at(1, 0)).norm() < 1e-14);
}

TEST_CASE("cayley edge relation and star congruence") {
  const EnneperPipeline pipe(5);
  const Window2& w = pipe.f.window;
  const double t = 1.0;
  double worst = 0;
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      const Mat3 C = cayley_transform(t * pipe.fstar.at(m, n));
      const int dm[4] = {1, -1, 0, 0}, dn[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        if (!w.contains(m + dm[k], n + dn[k])) continue;
        const Vec3 lhs = pipe.fm.at(m + dm[k], n + dn[k]) - pipe.fm.at(m, n);
        const Vec3 rhs = C * (pipe.fp.at(m + dm[k], n + dn[k]) - pipe.fp.at(m, n));
        worst = std::max(worst, (lhs - rhs).norm());
      }
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("snap angle grows near t = 0") {
  const EnneperPipeline pipe(3);
  const double a1 = snap_angle(pipe.fstar, 1, 1, RollDirection::axis2, 0.05);
  const double a2 = snap_angle(pipe.fstar, 1, 1, RollDirection::axis2, 0.1);
  CHECK(a1 > 1e-12);
  CHECK(a2 > a1);
}

TEST_CASE("roll_build on the enneper diagonal nets") {
  const EnneperPipeline pipe(6);
  RollOptions opts;
  opts.fstar = &pipe.fstar;
  opts.t = 1.0;
  const SnappingNet net = roll_build(pipe.gp, pipe.gm, opts);

  CHECK(net.cells.size() >= 4);
  CHECK(net.max_closure_residual < 1e-8);
  CHECK(net.max_anchor_residual < 1e-9);
  CHECK(net.max_angle_formula_error < 1e-9);
  CHECK(net.max_axis_formula_error < 1e-8);
  CHECK(net.snapping_cell_count() == static_cast<int>(net.cells.size()));

  SECTION("per-cell DH invariance and snapping classification") {
    int checked = 0;
    for (const auto& [ci, cell] : net.cells) {
      const FourBar fb = fourbar_from_cell(net, ci);
      CHECK(dh_max_difference(fb.dh, dh_cycle(fb.everted_axes)) < 1e-8);
      if (checked++) continue;  // classify one cell, the scan is costly
      const Classification c = classify_fourbar(fb.fixed_axes, 5, 360);
      CHECK(c.family == FourBarFamily::snapping);
      CHECK(c.config_count == 2);
    }
  }
}

TEST_CASE("a single white-face neighborhood gives exactly one cell") {
  const EnneperPipeline pipe(6);
  // crop a 4x4-vertex patch whose center face is white
  Window2 patch{-2, 1, -1, 2};
  REQUIRE_FALSE(ColoredNet::face_black(-1, 0));  // center face of the patch
  ColoredNet gp, gm;
  gp.net = QuadNet3(patch);
  gm.net = QuadNet3(patch);
  for (int U = patch.m0; U <= patch.m1; ++U)
    for (int V = patch.n0; V <= patch.n1; ++V) {
      gp.net.at(U, V) = pipe.gp.net.at(U, V);
      gm.net.at(U, V) = pipe.gm.net.at(U, V);
    }
  const SnappingNet net = roll_build(gp, gm);
  REQUIRE(net.cells.size() == 1);
  const FourBar fb = fourbar_from_cell(net, net.cells.begin()->first);
  const Classification c = classify_fourbar(fb.fixed_axes, 2, 360);
  CHECK(c.family == FourBarFamily::snapping);
  CHECK(c.config_count == 2);
}

TEST_CASE("roll_build of a surface with itself is degenerate") {
  const EnneperPipeline pipe(5);
  const SnappingNet net = roll_build(pipe.gm, pipe.gm);
  CHECK(net.snapping_cell_count() == 0);
  for (const auto& [s, ax] : net.axes) CHECK(ax.flag == AxisFlag::shaky_like);
}

TEST_CASE("congruent quad on the axes of a four-bar") {
  const EnneperPipeline pipe(6);
  const SnappingNet net = roll_build(pipe.gp, pipe.gm);
  const auto& [ci, cell] = *net.cells.begin();
  const FourBar fb = fourbar_from_cell(net, ci);

  const Vec3 gi = net.axes.at(cell.corners[0]).anchor_fixed;
  const Vec3 gj = net.axes.at(cell.corners[1]).anchor_fixed;
  const CongruentQuadPair pair = congruent_quad_on_axes(fb, gi, gj);
  CHECK(pair.residual < 1e-9);

  SECTION("sliding the prescribed points yields a family of solutions") {
    Rng rng(3);
    for (int it = 0; it < 8; ++it) {
      const Vec3 a = gi + uniform(rng, -1.0, 1.0) * fb.fixed_axes[0].direction.normalized();
      const Vec3 b = gj + uniform(rng, -1.0, 1.0) * fb.fixed_axes[1].direction.normalized();
      const CongruentQuadPair p = congruent_quad_on_axes(fb, a, b);
      CHECK(p.residual < 1e-8);
    }
  }

  SECTION("points off the axes are rejected") {
    const Vec3 off = gi + 0.5 * fb.fixed_axes[0].direction.normalized().cross(Vec3(1, 0, 0)).normalized();
    CHECK_THROWS_AS(congruent_quad_on_axes(fb, off, gj), PointsOffAxis);
  }
}

TEST_CASE("congruent quad with a mirror-symmetric four-bar") {
  // everted configuration mirrored in the plane x = 0; axes 2 and 3 are
  // invariant under the reflection, so the bisector planes coincide with the
  // symmetry plane and the construction closes by symmetry
  auto mirror_line = [](const LineAxis& L) {
    const Vec3 p = L.point_closest_to_origin();
    const Vec3 d = L.direction;
    return LineAxis::through_point(Vec3(-p.x(), p.y(), p.z()), Vec3(-d.x(), d.y(), d.z()));
  };
  const LineAxis a0 = LineAxis::through_point(Vec3(-1, 0.3, 0.2), Vec3(0.2, 0.9, 0.4).normalized());
  const LineAxis a1 = LineAxis::through_point(Vec3(0.8, -0.5, 1.1), Vec3(-0.4, 0.3, 0.85).normalized());
  const LineAxis a2 = LineAxis::through_point(Vec3(0, 1, 0.5), Vec3(0, 0.6, 0.8));   // inside x = 0
  const LineAxis a3 = LineAxis::through_point(Vec3(0, -1, 2), Vec3(1, 0, 0));        // perpendicular
  FourBar fb;
  fb.fixed_axes = {a0, a1, a2, a3};
  fb.everted_axes = {mirror_line(a0), mirror_line(a1), mirror_line(a2), mirror_line(a3)};
  const Vec3 gi = a0.point_closest_to_origin();
  const Vec3 gj = a1.point_closest_to_origin();
  const CongruentQuadPair pair = congruent_quad_on_axes(fb, gi, gj);
  CHECK(pair.residual < 1e-9);
  CHECK_FALSE(pair.direct);  // mirror images
}

TEST_CASE("snapping net from a built snet") {
  const SNet snet = snet_build(2, NetWindow{{{0, 3}, {0, 3}}}, 2025);
  const SnappingNet net = snapping_net_from_snet(snet);
  CHECK(net.cells.size() == 9);
  CHECK(net.max_closure_residual < 1e-8);
  for (const auto& [ci, cell] : net.cells) {
    const FourBar fb = fourbar_from_cell(net, ci);
    CHECK(dh_max_difference(fb.dh, dh_cycle(fb.everted_axes)) < 1e-8);
  }
}

TEST_CASE("propagate and re-roll the enneper snapping net") {
  const EnneperPipeline pipe(6);
  RollOptions opts;
  opts.fstar = &pipe.fstar;
  opts.t = 1.0;
  const SnappingNet net = roll_build(pipe.gp, pipe.gm, opts);

  // seeds from the pipeline's own fixed surface
  GridIndex central{0, 0};
  REQUIRE(net.links.count(central));
  const SnapLink& cl = net.links.at(central);
  std::array<Vec3, 4> central_quad;
  for (int k = 0; k < 4; ++k)
    central_quad[k] = pipe.gm.net.at(cl.corners[k].first, cl.corners[k].second);
  std::map<GridIndex, Vec3> diag;
  const Window2& gw = pipe.gm.net.window;
  for (int s = -8; s <= 8; ++s) {
    const GridIndex d1{central.first + s, central.second + s};
    const GridIndex d2{central.first + s, central.second + 1 - s};
    if (gw.contains(d1.first, d1.second)) diag[d1] = pipe.gm.net.at(d1.first, d1.second);
    if (gw.contains(d2.first, d2.second)) diag[d2] = pipe.gm.net.at(d2.first, d2.second);
  }
  const PropagatedSurfaces rec = propagate_congruent_net(net, central, central_quad, diag);
  CHECK(rec.cells_used >= 4);
  CHECK(rec.max_revisit_disagreement < 1e-8);

  // the reconstructed fixed surface agrees with the source where defined
  double worst = 0;
  rec.g.for_each([&](int U, int V, const Vec3& v) {
    worst = std::max(worst, (v - pipe.gm.net.at(U, V)).norm());
  });
  CHECK(worst < 1e-8);

  // black faces directly congruent, white faces congruent
  const Window2& w = rec.g.window;
  for (int U = w.m0; U < w.m1; ++U)
    for (int V = w.n0; V < w.n1; ++V) {
      const std::vector<Vec3> a{rec.g.at(U, V), rec.g.at(U + 1, V), rec.g.at(U + 1, V + 1),
                                rec.g.at(U, V + 1)};
      const std::vector<Vec3> b{rec.h.at(U, V), rec.h.at(U + 1, V), rec.h.at(U + 1, V + 1),
                                rec.h.at(U, V + 1)};
      if (ColoredNet::face_black(U, V)) {
        CHECK(fit_rigid(a, b).second < 1e-8);
      } else {
        // congruent, possibly indirectly
        double dist_err = 0;
        for (int s = 0; s < 4; ++s)
          for (int r = s + 1; r < 4; ++r)
            dist_err = std::max(dist_err, std::abs((a[s] - a[r]).norm() - (b[s] - b[r]).norm()));
        CHECK(dist_err < 1e-8);
      }
    }

  // rolling the reconstructed pair reproduces the net
  ColoredNet gp2, gm2;
  gp2.net = rec.h;
  gm2.net = rec.g;
  const SnappingNet net2 = roll_build(gp2, gm2);
  int compared = 0;
  for (const auto& [s, ax] : net2.axes) {
    if (!net.axes.count(s)) continue;
    const SnapAxis& ref = net.axes.at(s);
    if (ax.flag != AxisFlag::ok || ref.flag != AxisFlag::ok) continue;
    CHECK(std::abs(ax.snap_angle - ref.snap_angle) < 1e-7);
    CHECK(line_projective_distance(ax.fixed.unit(), ref.fixed.unit()) < 1e-7);
    ++compared;
  }
  CHECK(compared > 0);
}

TEST_CASE("propagate a zero-angle net") {
  const EnneperPipeline pipe(5);
  const SnappingNet net = roll_build(pipe.gm, pipe.gm);
  CHECK(net.snapping_cell_count() == 0);
}

TEST_CASE("propagate from seeded random snet faces") {
  const SNet snet = snet_build(2, NetWindow{{{0, 3}, {0, 3}}}, 31337);
  const SnappingNet net = snapping_net_from_snet(snet);
  REQUIRE(!net.links.empty());

  // pick a central link surrounded by cells
  GridIndex central = net.links.begin()->first;
  int best = -1;
  for (const auto& [li, link] : net.links) {
    int nb = 0;
    for (const auto& [ci, cell] : net.cells)
      if (std::abs(ci.first - li.first) + std::abs(ci.second - li.second) == 1) ++nb;
    if (nb > best) {
      best = nb;
      central = li;
    }
  }
  const SnapLink& cl = net.links.at(central);
  // seed the central quad on the axes (closest points) and diagonals
  std::array<Vec3, 4> central_quad;
  for (int k = 0; k < 4; ++k) central_quad[k] = net.axes.at(cl.corners[k]).anchor_fixed;
  std::map<GridIndex, Vec3> diag;
  for (int s = -6; s <= 6; ++s)
    for (const GridIndex d : {GridIndex{central.first + s, central.second + s},
                              GridIndex{central.first + s, central.second + 1 - s}})
      if (net.axes.count(d)) diag[d] = net.axes.at(d).anchor_fixed;

  const PropagatedSurfaces rec = propagate_congruent_net(net, central, central_quad, diag);
  CHECK(rec.cells_used >= 1);

  const Window2& w = rec.g.window;
  for (int U = w.m0; U < w.m1; ++U)
    for (int V = w.n0; V < w.n1; ++V) {
      double dist_err = 0;
      const Vec3 a[4] = {rec.g.at(U, V), rec.g.at(U + 1, V), rec.g.at(U + 1, V + 1), rec.g.at(U, V + 1)};
      const Vec3 b[4] = {rec.h.at(U, V), rec.h.at(U + 1, V), rec.h.at(U + 1, V + 1), rec.h.at(U, V + 1)};
      for (int s = 0; s < 4; ++s)
        for (int r = s + 1; r < 4; ++r)
          dist_err = std::max(dist_err, std::abs((a[s] - a[r]).norm() - (b[s] - b[r]).norm()));
      CHECK(dist_err < 1e-7);
    }
}
