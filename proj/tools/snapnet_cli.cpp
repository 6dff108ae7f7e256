// SPDX-License-Identifier: Apache-2.0
//
// Command line pipeline for snapping four-bar nets: generate the discrete
// minimal-surface example, build S-nets, de-average, roll, classify and
// verify, and export quad meshes.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>

#include "snapnet/snapnet.hpp"

namespace fs = std::filesystem;
using namespace snapnet;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConstruction = 3;

struct GlobalOptions {
  double tol = 1e-9;
  int workers = 1;
  bool degrees = false;
};

std::string format_angle(double radians, bool degrees) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", degrees ? radians * 180.0 / M_PI : radians);
  return std::string(buf) + (degrees ? " deg" : " rad");
}

QuadNet3 enneper_gauss_map(const Window2& w) {
  QuadNet3 fstar(w);
  for (int m = w.m0; m <= w.m1; ++m)
    for (int n = w.n0; n <= w.n1; ++n) {
      const double D = m * m + n * n + 16.0;
      fstar.at(m, n) = Vec3(16.0 * m, 16.0 * n, 4.0 * (m * m + n * n)) / D;
    }
  return fstar;
}

struct VerifyReport {
  struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = true;
  };
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> snap_angles;

  void add(const std::string& name, double value, double tolerance) {
    checks.push_back({name, value, tolerance, value <= tolerance});
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  json to_json_report() const {
    json jc = json::object();
    for (const auto& c : checks)
      jc[c.name] = json{{"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    json ja = json::object();
    for (const auto& [k, v] : snap_angles) ja[k] = v;
    return json{{"checks", jc}, {"snap_angles", ja}, {"pass", pass()}};
  }
  void print(bool degrees) const {
    for (const auto& c : checks)
      std::printf("%-28s %-12.3e (tol %.1e)  %s\n", c.name.c_str(), c.value, c.tolerance,
                  c.pass ? "pass" : "FAIL");
    for (const auto& [k, v] : snap_angles)
      std::printf("snap angle %-17s %s\n", k.c_str(), format_angle(v, degrees).c_str());
  }
};

// worker-pool map over an index range; the reduction below is order-free
template <typename F>
double parallel_max(int count, int workers, F&& f) {
  if (workers <= 1 || count < 4) {
    double worst = 0;
    for (int i = 0; i < count; ++i) worst = std::max(worst, f(i));
    return worst;
  }
  std::vector<std::future<double>> parts;
  const int chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    parts.push_back(std::async(std::launch::async, [lo, hi, &f] {
      double worst = 0;
      for (int i = lo; i < hi; ++i) worst = std::max(worst, f(i));
      return worst;
    }));
  }
  double worst = 0;
  for (auto& p : parts) worst = std::max(worst, p.get());
  return worst;
}

void verify_snet(const SNet& net, VerifyReport& report, double tol) {
  const SNetResiduals res = snet_residuals(net);
  report.add("study_residual", res.max_study, 10 * tol);
  report.add("edge_form", res.max_edge, 10 * tol);
}

void verify_rotnet(const RotationNet& rn, VerifyReport& report, double tol) {
  double worst_rot = 0;
  for (const auto& [key, r] : rn.edges) {
    const DualQuaternion rno = dq_normalized(r);
    worst_rot = std::max(worst_rot, std::abs(rno.dual.w));
    if (!is_rotation(rno)) worst_rot = std::max(worst_rot, 1.0);
  }
  report.add("edge_rotation", worst_rot, 10 * tol);
  if (rn.dim < 2) return;
  double worst = 0;
  bool have_scalar = false;
  double scalar_example = 0;
  for (int a = 0; a < rn.dim; ++a)
    for (int b = a + 1; b < rn.dim; ++b)
      for (const auto& lower : rn.window.all_indices()) {
        if (lower[a] >= rn.window.ranges[a].second || lower[b] >= rn.window.ranges[b].second) continue;
        const RotationQuadrilateral q = face_quadrilateral(rn, lower, a, b);
        worst = std::max(worst, face_closure_residual(q));
        if (!have_scalar) {
          DualQuaternion prod = DualQuaternion::identity();
          for (int k = 0; k < 4; ++k) prod = q.rotations[k] * prod;
          scalar_example = prod.primal.w;
          have_scalar = true;
        }
      }
  report.add("face_closure", worst, 1e-7);
  if (have_scalar) std::printf("face product scalar: %.12g\n", scalar_example);
}

void verify_koenigs_pair(const QuadNet3& f, const QuadNet3& fstar, VerifyReport& report) {
  const KoenigsReport rep = koenigs_check(f, fstar);
  report.add("koenigs_K1", rep.max_edge_parallel, 1e-8);
  report.add("koenigs_K2", rep.max_diag_parallel, 1e-8);
  report.add("face_planarity", rep.max_face_planarity, 1e-8);
}

void verify_isometric_pair(const QuadNet3& a, const QuadNet3& b, VerifyReport& report, int workers) {
  const double scale = std::max(1.0, a.max_edge_length());
  const Window2& w = a.window;
  const int faces = (w.rows() - 1) * (w.cols() - 1);
  const double worst_face = parallel_max(faces, workers, [&](int idx) {
    const int m = w.m0 + idx / (w.cols() - 1);
    const int n = w.n0 + idx % (w.cols() - 1);
    const std::vector<Vec3> src{a.at(m, n), a.at(m + 1, n), a.at(m + 1, n + 1), a.at(m, n + 1)};
    const std::vector<Vec3> dst{b.at(m, n), b.at(m + 1, n), b.at(m + 1, n + 1), b.at(m, n + 1)};
    double dist_err = 0;
    for (int s = 0; s < 4; ++s)
      for (int r = s + 1; r < 4; ++r)
        dist_err = std::max(dist_err, std::abs((src[s] - src[r]).norm() - (dst[s] - dst[r]).norm()));
    return dist_err;
  });
  report.add("isometry_edge", isometry_report(a, b, IsometryMode::edge), 1e-9 * scale);
  report.add("isometry_face_metric", worst_face, 1e-8 * scale);
}

void verify_snapping(const SnappingNet& net, VerifyReport& report, bool degrees) {
  double worst_closure = 0, worst_dh = 0;
  for (const auto& [ci, cell] : net.cells) {
    worst_closure = std::max(worst_closure, cell.closure_residual);
    const FourBar fb = fourbar_from_cell(net, ci);
    worst_dh = std::max(worst_dh, dh_max_difference(fb.dh, dh_cycle(fb.everted_axes)));
  }
  report.add("cell_closure", worst_closure, 1e-8);
  report.add("cell_dh_invariance", worst_dh, 1e-8);
  double worst_pluecker = 0;
  for (const auto& [s, ax] : net.axes) {
    worst_pluecker = std::max(worst_pluecker, ax.fixed.pluecker_residual());
    report.snap_angles.push_back({grid_key(s) + " [" + to_string(ax.flag) + "]", ax.snap_angle});
  }
  report.add("axis_pluecker", worst_pluecker, 1e-9);
  (void)degrees;
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

void write_json(const fs::path& path, const json& j) { write_file(path.string(), j.dump(2) + "\n"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snapping four-bar nets: construction, verification, export"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; command line flags win");
  app.add_option("--tol", global.tol, "algebraic tolerance for verification");
  app.add_option("--workers", global.workers, "worker pool size for verification sweeps");
  app.add_flag("--degrees", global.degrees, "print angles in degrees instead of radians");

  // ---- enneper ----
  auto* cmd_enneper = app.add_subcommand("enneper", "discrete minimal-surface pipeline end to end");
  std::vector<int> window{-4, 4, -4, 4};
  double t = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> q0{0, 0, 1};
  std::string moebius_json, out_dir = ".";
  cmd_enneper->add_option("--window", window, "window m0 m1 n0 n1")->expected(4);
  cmd_enneper->add_option("--t", t, "de-averaging parameter (nonzero)");
  cmd_enneper->add_option("--seed", seed, "seed (reserved; the pipeline is deterministic)");
  cmd_enneper->add_option("--q0", q0, "velocity anchor at the origin index")->expected(3);
  cmd_enneper->add_option("--moebius", moebius_json, "JSON inversive transform of the base grid");
  cmd_enneper->add_option("--out", out_dir, "output directory");

  // ---- snet ----
  auto* cmd_snet = app.add_subcommand("snet", "build a quadric net of dimension d <= 6");
  int dim = 2;
  std::vector<int> snet_window;
  std::uint64_t snet_seed = 1;
  std::string snet_out = ".";
  cmd_snet->add_option("--dim", dim, "net dimension (1..6)");
  cmd_snet->add_option("--window", snet_window, "per-axis ranges lo hi lo hi ...");
  cmd_snet->add_option("--seed", snet_seed, "random seed");
  cmd_snet->add_option("--out", snet_out, "output directory");

  // ---- deaverage ----
  auto* cmd_deavg = app.add_subcommand("deaverage", "velocity field and de-averaged pair from a dual");
  std::string da_net, da_dual, da_out = ".";
  double da_t = 1.0;
  std::vector<double> da_q0{0, 0, 1};
  cmd_deavg->add_option("--net", da_net, "quad net JSON")->required();
  cmd_deavg->add_option("--dual", da_dual, "its Koenigs dual JSON")->required();
  cmd_deavg->add_option("--t", da_t, "de-averaging parameter (nonzero)");
  cmd_deavg->add_option("--q0", da_q0, "velocity anchor")->expected(3);
  cmd_deavg->add_option("--out", da_out, "output directory");

  // ---- roll ----
  auto* cmd_roll = app.add_subcommand("roll", "snapping net by rolling one surface on another");
  std::string roll_plus, roll_minus, roll_fstar, roll_out = ".";
  double roll_t = 1.0;
  cmd_roll->add_option("--plus", roll_plus, "moving surface JSON (diagonal lattice)")->required();
  cmd_roll->add_option("--minus", roll_minus, "fixed surface JSON (diagonal lattice)")->required();
  cmd_roll->add_option("--fstar", roll_fstar, "optional Koenigs dual for formula cross-checks");
  cmd_roll->add_option("--t", roll_t, "de-averaging parameter used with --fstar");
  cmd_roll->add_option("--out", roll_out, "output directory");

  // ---- classify ----
  auto* cmd_classify = app.add_subcommand("classify", "assembly count of a 4R loop");
  std::string axes_path;
  int grid = 720;
  std::uint64_t cls_seed = 1;
  cmd_classify->add_option("--axes", axes_path, "JSON with four Pluecker lines")->required();
  cmd_classify->add_option("--grid", grid, "scan resolution");
  cmd_classify->add_option("--seed", cls_seed, "random seed");

  // ---- verify ----
  auto* cmd_verify = app.add_subcommand("verify", "residual suite over any artifact files");
  std::string v_snet, v_rotnet, v_net, v_dual, v_snapping, v_out;
  std::vector<std::string> v_pair;
  cmd_verify->add_option("--snet", v_snet, "S-net JSON");
  cmd_verify->add_option("--rotnet", v_rotnet, "rotation net JSON");
  cmd_verify->add_option("--net", v_net, "quad net JSON (verified against --dual)");
  cmd_verify->add_option("--dual", v_dual, "Koenigs dual JSON");
  cmd_verify->add_option("--pair", v_pair, "two isometric surface JSONs")->expected(2);
  cmd_verify->add_option("--snapping", v_snapping, "snapping net JSON");
  cmd_verify->add_option("--out", v_out, "write the report JSON here");

  // ---- export ----
  auto* cmd_export = app.add_subcommand("export", "convert between quad net JSON and mesh text");
  std::string ex_in, ex_out, ex_format = "mesh";
  cmd_export->add_option("--in", ex_in, "input file (JSON or mesh)")->required();
  cmd_export->add_option("--out", ex_out, "output file")->required();
  cmd_export->add_option("--format", ex_format, "mesh or json")->check(CLI::IsMember({"mesh", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      const json cfg = load_json(config_path);
      // flags win: only read config values the user did not set
      if (cfg.count("tol") && !app.count("--tol")) global.tol = cfg["tol"].get<double>();
      if (cfg.count("workers") && !app.count("--workers")) global.workers = cfg["workers"].get<int>();
      if (cmd_enneper->parsed()) {
        if (cfg.count("window") && !cmd_enneper->count("--window"))
          window = cfg["window"].get<std::vector<int>>();
        if (cfg.count("t") && !cmd_enneper->count("--t")) t = cfg["t"].get<double>();
        if (cfg.count("q0") && !cmd_enneper->count("--q0")) q0 = cfg["q0"].get<std::vector<double>>();
        if (cfg.count("moebius") && !cmd_enneper->count("--moebius")) moebius_json = cfg["moebius"].dump();
        if (cfg.count("out") && !cmd_enneper->count("--out")) out_dir = cfg["out"].get<std::string>();
      }
    }

    Tolerances tol;
    tol.algebraic = global.tol;
    tol.geometric = global.tol;

    if (cmd_enneper->parsed()) {
      if (t == 0.0) {
        std::fprintf(stderr, "enneper: --t must be nonzero (de-averaging is undefined at t = 0)\n");
        return kExitUsage;
      }
      const Window2 w{window[0], window[1], window[2], window[3]};
      if (w.empty() || !w.contains(0, 0) || !w.contains(1, 0)) {
        std::fprintf(stderr, "enneper: window must contain the seed edge (0,0)-(1,0)\n");
        return kExitUsage;
      }
      QuadNet3 base = grid_plane(w);
      if (!moebius_json.empty()) {
        const json mj = json::parse(moebius_json);
        MoebiusParams mp;
        if (mj.count("scale")) mp.scale = mj["scale"].get<double>();
        if (mj.count("rotation")) mp.rotation = vec3_from_json(mj["rotation"]);
        if (mj.count("translate")) mp.translate = vec3_from_json(mj["translate"]);
        if (mj.count("invert")) mp.invert = mj["invert"].get<bool>();
        if (mj.count("center")) mp.center = vec3_from_json(mj["center"]);
        if (mj.count("radius")) mp.radius = mj["radius"].get<double>();
        base = moebius_pretransform(base, mp);
      }
      const QuadNet3 fstar = inverse_stereographic(base);
      const Vec3 seed_b = fstar.at(1, 0) - fstar.at(0, 0);
      const double seed_scale = moebius_json.empty() ? 17.0 / 123.0 : 1.0 / std::max(1e-12, seed_b.norm());
      const QuadNet3 f = koenigs_dual_reconstruct(fstar, Vec3::Zero(), seed_b * seed_scale, {0, 0}, {1, 0}, tol);
      const VelocityField q = iid_from_dual(f, fstar, Vec3(q0[0], q0[1], q0[2]), tol);
      const auto [fp, fm] = deaverage(f, q, t, tol);
      const ColoredNet gp = diagonal_net(fp), gm = diagonal_net(fm);
      RollOptions opts;
      opts.fstar = &fstar;
      opts.t = t;
      const SnappingNet snapping = roll_build(gp, gm, opts, tol);

      const fs::path out(out_dir);
      fs::create_directories(out);
      write_json(out / "fstar.json", to_json(fstar));
      write_json(out / "f.json", to_json(f));
      write_json(out / "q.json", to_json(q));
      write_json(out / "fplus.json", to_json(fp));
      write_json(out / "fminus.json", to_json(fm));
      write_json(out / "gplus.json", to_json(gp.net));
      write_json(out / "gminus.json", to_json(gm.net));
      write_json(out / "snapping.json", to_json(snapping));
      write_file((out / "gplus.mesh").string(), mesh_export(gp.net));
      write_file((out / "gminus.mesh").string(), mesh_export(gm.net));
      std::printf("enneper: %zu cells, %zu axes, max closure %.3e\n", snapping.cells.size(),
                  snapping.axes.size(), snapping.max_closure_residual);
      return kExitPass;
    }

    if (cmd_snet->parsed()) {
      if (dim < 1 || dim > 6) {
        std::fprintf(stderr, "snet: --dim must be in 1..6\n");
        return kExitUsage;
      }
      NetWindow w;
      if (snet_window.empty()) {
        for (int k = 0; k < dim; ++k) w.ranges.push_back({0, 1});
      } else if (static_cast<int>(snet_window.size()) == 2 * dim) {
        for (int k = 0; k < dim; ++k) w.ranges.push_back({snet_window[2 * k], snet_window[2 * k + 1]});
      } else {
        std::fprintf(stderr, "snet: --window needs %d lo/hi pairs\n", dim);
        return kExitUsage;
      }
      SNet net;
      try {
        net = snet_build(dim, w, snet_seed);
      } catch (const ConstructionFailed& e) {
        std::fprintf(stderr, "snet: %s (retry with a different --seed)\n", e.what());
        return kExitConstruction;
      }
      const RotationNet rn = rotation_net(net, tol);
      const fs::path out(snet_out);
      fs::create_directories(out);
      write_json(out / "snet.json", to_json(net));
      write_json(out / "rotnet.json", to_json(rn));
      VerifyReport report;
      verify_snet(net, report, global.tol);
      verify_rotnet(rn, report, global.tol);
      write_json(out / "report.json", report.to_json_report());
      report.print(global.degrees);
      return report.pass() ? kExitPass : kExitVerifyFail;
    }

    if (cmd_deavg->parsed()) {
      if (da_t == 0.0) {
        std::fprintf(stderr, "deaverage: --t must be nonzero\n");
        return kExitUsage;
      }
      const QuadNet3 f = quadnet_from_json(load_json(da_net));
      const QuadNet3 fstar = quadnet_from_json(load_json(da_dual));
      const VelocityField q = iid_from_dual(f, fstar, Vec3(da_q0[0], da_q0[1], da_q0[2]), tol);
      const auto [fp, fm] = deaverage(f, q, da_t, tol);
      const fs::path out(da_out);
      fs::create_directories(out);
      write_json(out / "q.json", to_json(q));
      write_json(out / "fplus.json", to_json(fp));
      write_json(out / "fminus.json", to_json(fm));
      return kExitPass;
    }

    if (cmd_roll->parsed()) {
      ColoredNet gp, gm;
      gp.net = quadnet_from_json(load_json(roll_plus));
      gm.net = quadnet_from_json(load_json(roll_minus));
      RollOptions opts;
      QuadNet3 fstar;
      if (!roll_fstar.empty()) {
        fstar = quadnet_from_json(load_json(roll_fstar));
        opts.fstar = &fstar;
        opts.t = roll_t;
      }
      const SnappingNet net = roll_build(gp, gm, opts, tol);
      const fs::path out(roll_out);
      fs::create_directories(out);
      write_json(out / "snapping.json", to_json(net));
      std::printf("roll: %zu cells, %d snapping, max closure %.3e\n", net.cells.size(),
                  net.snapping_cell_count(), net.max_closure_residual);
      return kExitPass;
    }

    if (cmd_classify->parsed()) {
      const json j = load_json(axes_path);
      std::array<LineAxis, 4> axes;
      if (j.is_object() && j.count("fixed_axes")) {
        const FourBar fb = fourbar_from_json(j);
        axes = fb.fixed_axes;
      } else {
        for (int k = 0; k < 4; ++k) axes[k] = line_from_json(j.at(k));
      }
      Classification c;
      try {
        c = classify_fourbar(axes, cls_seed, grid, tol);
      } catch (const Inconclusive& e) {
        std::fprintf(stderr, "classify: inconclusive: %s\n", e.what());
        return kExitVerifyFail;
      }
      std::printf("family: %s\n", to_string(c.family));
      std::printf("configurations: %d\n", c.config_count);
      for (const auto& cfg : c.configurations)
        std::printf("  theta0 = %s, theta1 = %s (residual %.2e)\n",
                    format_angle(cfg.theta0, global.degrees).c_str(),
                    format_angle(cfg.theta1, global.degrees).c_str(), cfg.residual);
      return kExitPass;
    }

    if (cmd_verify->parsed()) {
      VerifyReport report;
      if (!v_snet.empty()) verify_snet(snet_from_json(load_json(v_snet)), report, global.tol);
      if (!v_rotnet.empty()) verify_rotnet(rotation_net_from_json(load_json(v_rotnet)), report, global.tol);
      if (!v_net.empty() && !v_dual.empty())
        verify_koenigs_pair(quadnet_from_json(load_json(v_net)), quadnet_from_json(load_json(v_dual)),
                            report);
      if (v_pair.size() == 2)
        verify_isometric_pair(quadnet_from_json(load_json(v_pair[0])),
                              quadnet_from_json(load_json(v_pair[1])), report, global.workers);
      if (!v_snapping.empty()) verify_snapping(snapping_from_json(load_json(v_snapping)), report, global.degrees);
      if (report.checks.empty()) {
        std::fprintf(stderr, "verify: no inputs given\n");
        return kExitUsage;
      }
      report.print(global.degrees);
      if (!v_out.empty()) write_json(v_out, report.to_json_report());
      return report.pass() ? kExitPass : kExitVerifyFail;
    }

    if (cmd_export->parsed()) {
      const std::string text = read_file(ex_in);
      if (ex_format == "mesh") {
        const QuadNet3 net = quadnet_from_json(json::parse(text));
        write_file(ex_out, mesh_export(net));
      } else {
        QuadNet3 net;
        if (!text.empty() && (text[0] == '{' || text[0] == '['))
          net = quadnet_from_json(json::parse(text));
        else
          net = mesh_import(text);
        write_json(ex_out, to_json(net));
      }
      return kExitPass;
    }
  } catch (const ConstructionFailed& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConstruction;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerifyFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
