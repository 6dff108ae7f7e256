// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "snapnet/koenigs.hpp"
#include "snapnet/rolling.hpp"
#include "snapnet/studynet.hpp"

namespace snapnet {

using json = nlohmann::json;

inline json to_json(const DualQuaternion& p) {
  json a = json::array();
  for (double v : p.coords()) a.push_back(v);
  return a;
}

inline DualQuaternion dq_from_json(const json& j) {
  std::array<double, 8> c{};
  for (int i = 0; i < 8; ++i) c[i] = j.at(i).get<double>();
  return DualQuaternion::from_coords(c);
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

inline json to_json(const LineAxis& L) {
  return json{{"direction", to_json(L.direction)}, {"moment", to_json(L.moment)}};
}

inline LineAxis line_from_json(const json& j) {
  if (j.is_array()) {  // flat Pluecker 6-array
    return LineAxis(Vec3(j.at(0), j.at(1), j.at(2)), Vec3(j.at(3), j.at(4), j.at(5)));
  }
  return LineAxis(vec3_from_json(j.at("direction")), vec3_from_json(j.at("moment")));
}

// ---- SNet ----

inline json to_json(const SNet& net) {
  json w = json::array();
  for (const auto& [lo, hi] : net.window.ranges) w.push_back(json::array({lo, hi}));
  json verts = json::object();
  for (const auto& [idx, p] : net.vertices) verts[index_to_string(idx)] = to_json(p);
  return json{{"dim", net.dim}, {"window", w}, {"vertices", verts}};
}

inline MultiIndex index_from_string(const std::string& s) {
  MultiIndex idx;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) idx.push_back(std::stoi(tok));
  return idx;
}

inline SNet snet_from_json(const json& j) {
  SNet net;
  net.dim = j.at("dim").get<int>();
  for (const auto& r : j.at("window")) net.window.ranges.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  for (const auto& [key, val] : j.at("vertices").items()) net.vertices[index_from_string(key)] = dq_from_json(val);
  return net;
}

// ---- RotationNet ----

inline json to_json(const RotationNet& rn) {
  json w = json::array();
  for (const auto& [lo, hi] : rn.window.ranges) w.push_back(json::array({lo, hi}));
  json edges = json::object();
  for (const auto& [key, r] : rn.edges)
    edges[index_to_string(key.first) + "|" + std::to_string(key.second)] = to_json(r);
  return json{{"dim", rn.dim}, {"window", w}, {"edges", edges}};
}

inline RotationNet rotation_net_from_json(const json& j) {
  RotationNet rn;
  rn.dim = j.at("dim").get<int>();
  for (const auto& r : j.at("window")) rn.window.ranges.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  for (const auto& [key, val] : j.at("edges").items()) {
    const auto bar = key.find('|');
    rn.edges[{index_from_string(key.substr(0, bar)), std::stoi(key.substr(bar + 1))}] = dq_from_json(val);
  }
  return rn;
}

// ---- QuadNet3 / VelocityField ----

inline json to_json(const QuadNet3& net) {
  json verts = json::array();
  for (const auto& v : net.values) verts.push_back(to_json(v));
  return json{{"window", json::array({net.window.m0, net.window.m1, net.window.n0, net.window.n1})},
              {"vertices", verts}};
}

inline QuadNet3 quadnet_from_json(const json& j) {
  const auto& w = j.at("window");
  QuadNet3 net(Window2{w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>(), w.at(3).get<int>()});
  const auto& verts = j.at("vertices");
  if (static_cast<int>(verts.size()) != net.window.count())
    throw Error("quadnet_from_json: vertex count does not match window");
  for (std::size_t i = 0; i < verts.size(); ++i) net.values[i] = vec3_from_json(verts[i]);
  return net;
}

inline json to_json(const VelocityField& q) {
  json vecs = json::array();
  for (const auto& v : q.vectors) vecs.push_back(to_json(v));
  return json{{"window", json::array({q.window.m0, q.window.m1, q.window.n0, q.window.n1})},
              {"vectors", vecs}};
}

inline VelocityField velocity_from_json(const json& j) {
  const auto& w = j.at("window");
  VelocityField q(Window2{w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>(), w.at(3).get<int>()});
  const auto& vecs = j.at("vectors");
  for (std::size_t i = 0; i < vecs.size(); ++i) q.vectors[i] = vec3_from_json(vecs[i]);
  return q;
}

// ---- FourBar ----

inline json to_json(const FourBar& fb) {
  auto lines = [](const std::array<LineAxis, 4>& ax) {
    json a = json::array();
    for (const auto& L : ax)
      a.push_back(json::array({L.direction.x(), L.direction.y(), L.direction.z(), L.moment.x(),
                               L.moment.y(), L.moment.z()}));
    return a;
  };
  json dh = json::array();
  for (const auto& p : fb.dh) dh.push_back(json{{"a", p.a}, {"d", p.d}, {"alpha", p.alpha}});
  return json{{"fixed_axes", lines(fb.fixed_axes)}, {"everted_axes", lines(fb.everted_axes)}, {"dh", dh}};
}

inline FourBar fourbar_from_json(const json& j) {
  FourBar fb;
  for (int k = 0; k < 4; ++k) {
    fb.fixed_axes[k] = line_from_json(j.at("fixed_axes").at(k));
    fb.everted_axes[k] = line_from_json(j.at("everted_axes").at(k));
  }
  if (j.count("dh"))
    for (int k = 0; k < 4; ++k) {
      const auto& p = j.at("dh").at(k);
      fb.dh[k] = DHParams{p.at("a").get<double>(), p.at("d").get<double>(), p.at("alpha").get<double>()};
    }
  return fb;
}

// ---- SnappingNet ----

inline std::string grid_key(const GridIndex& g) {
  return std::to_string(g.first) + "," + std::to_string(g.second);
}

inline GridIndex grid_from_key(const std::string& s) {
  const auto comma = s.find(',');
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

inline json to_json(const SnappingNet& net) {
  json axes = json::object();
  for (const auto& [s, ax] : net.axes) {
    axes[grid_key(s)] = json{
        {"fixed", json{{"anchor", to_json(ax.anchor_fixed)}, {"direction", to_json(ax.fixed.direction)}}},
        {"everted",
         json{{"anchor", to_json(ax.anchor_everted)}, {"direction", to_json(ax.everted.direction)}}},
        {"snap_angle", ax.snap_angle},
        {"flag", to_string(ax.flag)}};
  }
  auto faces = [](const auto& m) {
    json out = json::object();
    for (const auto& [idx, entry] : m) {
      json corners = json::array();
      for (const auto& c : entry.corners) corners.push_back(grid_key(c));
      out[grid_key(idx)] = corners;
    }
    return out;
  };
  return json{{"axes", axes},
              {"cells", faces(net.cells)},
              {"links", faces(net.links)},
              {"residuals",
               json{{"closure", net.max_closure_residual},
                    {"anchor", net.max_anchor_residual},
                    {"angle_formula", net.max_angle_formula_error},
                    {"axis_formula", net.max_axis_formula_error}}}};
}

inline SnappingNet snapping_from_json(const json& j) {
  SnappingNet net;
  for (const auto& [key, ax] : j.at("axes").items()) {
    SnapAxis a;
    a.anchor_fixed = vec3_from_json(ax.at("fixed").at("anchor"));
    a.fixed = LineAxis::through_point(a.anchor_fixed, vec3_from_json(ax.at("fixed").at("direction")));
    a.anchor_everted = vec3_from_json(ax.at("everted").at("anchor"));
    a.everted = LineAxis::through_point(a.anchor_everted, vec3_from_json(ax.at("everted").at("direction")));
    a.snap_angle = ax.at("snap_angle").get<double>();
    const std::string flag = ax.at("flag").get<std::string>();
    a.flag = flag == "ok" ? AxisFlag::ok
                          : (flag == "shaky_like" ? AxisFlag::shaky_like : AxisFlag::reflection_like);
    net.axes[grid_from_key(key)] = a;
  }
  for (const auto& [key, corners] : j.at("cells").items()) {
    SnapCell c;
    for (int k = 0; k < 4; ++k) c.corners[k] = grid_from_key(corners.at(k).get<std::string>());
    net.cells[grid_from_key(key)] = c;
  }
  for (const auto& [key, corners] : j.at("links").items()) {
    SnapLink l;
    for (int k = 0; k < 4; ++k) l.corners[k] = grid_from_key(corners.at(k).get<std::string>());
    net.links[grid_from_key(key)] = l;
  }
  return net;
}

// ---- plain text mesh (quad faces, 1-based indices) ----

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string mesh_export(const QuadNet3& net) {
  std::string out;
  const Window2& w = net.window;
  out += "# quadnet " + std::to_string(w.m0) + " " + std::to_string(w.m1) + " " + std::to_string(w.n0) +
         " " + std::to_string(w.n1) + "\n";
  for (const auto& v : net.values)
    out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  for (int m = w.m0; m < w.m1; ++m)
    for (int n = w.n0; n < w.n1; ++n) {
      const int a = w.offset(m, n) + 1, b = w.offset(m + 1, n) + 1, c = w.offset(m + 1, n + 1) + 1,
                d = w.offset(m, n + 1) + 1;
      out += "f " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c) + " " +
             std::to_string(d) + "\n";
    }
  return out;
}

inline QuadNet3 mesh_import(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Window2 w{};
  bool have_window = false;
  std::vector<Vec3> verts;
  while (std::getline(in, line)) {
    if (line.rfind("# quadnet", 0) == 0) {
      std::istringstream ls(line.substr(9));
      ls >> w.m0 >> w.m1 >> w.n0 >> w.n1;
      have_window = true;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      double x, y, z;
      ls >> x >> y >> z;
      verts.emplace_back(x, y, z);
    }
  }
  if (!have_window) {
    // fall back to a single-row window
    w = Window2{0, static_cast<int>(verts.size()) - 1, 0, 0};
  }
  QuadNet3 net(w);
  if (verts.size() != net.values.size()) throw Error("mesh_import: vertex count does not match window");
  net.values = std::move(verts);
  return net;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << contents;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace snapnet
