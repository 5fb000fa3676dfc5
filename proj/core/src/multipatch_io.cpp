#include "ietidp/error.hpp"
#include "ietidp/multipatch.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ietidp {

namespace {

nlohmann::json knots_json(const KnotVector& kv) {
  return {{"degree", kv.degree()},
          {"knots", std::vector<double>(kv.knots().begin(), kv.knots().end())}};
}

nlohmann::json side_json(const InterfaceSide& s) {
  return {{"patch", s.patch}, {"side", to_string(s.side)}, {"begin", s.begin}, {"end", s.end}};
}

}  // namespace

std::string multipatch_to_json(const MultiPatch& mp) {
  nlohmann::json doc;
  doc["schema"] = "ietidp.multipatch/1";
  doc["tolerance"] = mp.tolerance();
  auto& patches = doc["patches"] = nlohmann::json::array();
  for (int k = 0; k < mp.num_patches(); ++k) {
    const GeometryMap& g = mp.geometry(k);
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& c : g.control_points()) cps.push_back({c.x(), c.y()});
    patches.push_back({
        {"index", k},
        {"geometry",
         {{"u", knots_json(g.space().u())},
          {"v", knots_json(g.space().v())},
          {"control_points", cps},
          {"weights", std::vector<double>(g.weights().begin(), g.weights().end())}}},
        {"space", {{"u", knots_json(mp.space(k).u())}, {"v", knots_json(mp.space(k).v())}}},
    });
  }
  auto& ifs = doc["interfaces"] = nlohmann::json::array();
  for (const Interface& i : mp.interfaces())
    ifs.push_back({{"first", side_json(i.first)},
                   {"second", side_json(i.second)},
                   {"reversed", i.reversed},
                   {"length", i.length},
                   {"mesh_size", i.mesh_size}});
  auto& js = doc["junctions"] = nlohmann::json::array();
  for (const Junction& j : mp.junctions()) {
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& c : j.incident)
      inc.push_back({{"patch", c.patch}, {"side", to_string(c.side)}, {"param", c.param}});
    js.push_back({{"point", {j.point.x(), j.point.y()}}, {"kind", to_string(j.kind)}, {"incident", inc}});
  }
  auto& ds = doc["dirichlet"] = nlohmann::json::array();
  for (const PatchSide& d : mp.dirichlet_sides())
    ds.push_back({{"patch", d.patch}, {"side", to_string(d.side)}});
  return doc.dump(2);
}

void write_multipatch(const MultiPatch& mp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << multipatch_to_json(mp) << '\n';
}

std::string boundary_polylines(const MultiPatch& mp, int samples_per_side) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# ietidp.polylines/1\n";
  out << "# patch <index> <count> followed by <count> lines 'x y'; junction <x> <y> <kind>\n";
  for (int k = 0; k < mp.num_patches(); ++k) {
    const GeometryMap& g = mp.geometry(k);
    std::vector<Eigen::Vector2d> pts;
    // counter-clockwise in the parameter domain: south, east, north, west
    for (int i = 0; i < samples_per_side; ++i) pts.push_back(g.point(double(i) / samples_per_side, 0.0));
    for (int i = 0; i < samples_per_side; ++i) pts.push_back(g.point(1.0, double(i) / samples_per_side));
    for (int i = 0; i < samples_per_side; ++i)
      pts.push_back(g.point(1.0 - double(i) / samples_per_side, 1.0));
    for (int i = 0; i <= samples_per_side; ++i)
      pts.push_back(g.point(0.0, 1.0 - double(i) / samples_per_side));
    out << "patch " << k << ' ' << pts.size() << '\n';
    for (const auto& p : pts) out << p.x() << ' ' << p.y() << '\n';
  }
  for (const Junction& j : mp.junctions())
    out << "junction " << j.point.x() << ' ' << j.point.y() << ' ' << to_string(j.kind) << '\n';
  return out.str();
}

}  // namespace ietidp
