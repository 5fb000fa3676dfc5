#include "ietidp/multipatch.hpp"

#include "ietidp/error.hpp"
#include "ietidp/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ietidp {

namespace {

constexpr double kParamTol = 1e-7;

Eigen::Vector2d edge_point(const GeometryMap& geo, Side side, double t) {
  const Eigen::Vector2d par = side_parameter(side, t);
  return geo.point(par.x(), par.y());
}

Eigen::Vector2d edge_tangent(const GeometryMap& geo, Side side, double t) {
  const Eigen::Vector2d par = side_parameter(side, t);
  return geo.eval(par.x(), par.y()).jacobian.col(along_direction(side));
}

bool boxes_touch(const GeometryMap& a, const GeometryMap& b, double tol) {
  const auto [alo, ahi] = a.bounding_box();
  const auto [blo, bhi] = b.bounding_box();
  return (alo.array() <= bhi.array() + tol).all() && (blo.array() <= ahi.array() + tol).all();
}

std::optional<Interface> match_edges(std::span<const GeometryMap> patches, int k, Side a, int l,
                                     Side b, double tol) {
  const GeometryMap& gk = patches[k];
  const GeometryMap& gl = patches[l];
  struct Candidate {
    double ta, tb;
  };
  std::vector<Candidate> cand;
  for (double e : {0.0, 1.0}) {
    const EdgeProjection pr = project_to_edge(gl, b, edge_point(gk, a, e));
    if (pr.distance < tol) cand.push_back({e, pr.t});
    const EdgeProjection pa = project_to_edge(gk, a, edge_point(gl, b, e));
    if (pa.distance < tol) cand.push_back({pa.t, e});
  }
  if (cand.size() < 2) return std::nullopt;
  std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) { return x.ta < y.ta; });
  const Candidate lo = cand.front();
  const Candidate hi = cand.back();
  if ((edge_point(gk, a, hi.ta) - edge_point(gk, a, lo.ta)).norm() < tol) return std::nullopt;

  // endpoints coincide; the curves in between must coincide too
  constexpr int samples = 8;
  for (int q = 1; q < samples; ++q) {
    const double t = lo.ta + (hi.ta - lo.ta) * q / samples;
    if (project_to_edge(gl, b, edge_point(gk, a, t)).distance > tol) return std::nullopt;
  }

  Interface iface;
  iface.first = {k, a, lo.ta, hi.ta};
  iface.second = {l, b, std::min(lo.tb, hi.tb), std::max(lo.tb, hi.tb)};
  iface.reversed = hi.tb < lo.tb;
  iface.length = edge_length(gk, a, lo.ta, hi.ta);
  return iface;
}

void check_non_overlapping(std::span<const GeometryMap> patches, double tol) {
  const int n = static_cast<int>(patches.size());
  constexpr double margin = 1e-6;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l || !boxes_touch(patches[k], patches[l], tol)) continue;
      for (double u : {0.25, 0.5, 0.75})
        for (double v : {0.25, 0.5, 0.75}) {
          const auto par = patches[l].invert(patches[k].point(u, v), tol);
          if (par && (par->array() > margin).all() && (par->array() < 1.0 - margin).all()) {
            std::ostringstream msg;
            msg << "patches " << k << " and " << l << " overlap";
            throw TopologyError(msg.str());
          }
        }
    }
}

double side_mesh_size(const GeometryMap& geo, const TensorSplineSpace& space,
                      const InterfaceSide& s) {
  // the element layer next to the interface: physical width across it
  // (normal direction) and element length along it
  const auto bp = space.direction(along_direction(s.side)).breakpoints();
  const auto bn = space.direction(normal_direction(s.side)).breakpoints();
  const double inner = is_upper(s.side) ? bn[bn.size() - 2] : bn[1];
  const double edge = is_upper(s.side) ? 1.0 : 0.0;
  double along = 0.0, across = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = std::max(bp[i], s.begin), b = std::min(bp[i + 1], s.end);
    if (b - a <= 1e-12) continue;
    along = std::max(along, edge_length(geo, s.side, bp[i], bp[i + 1]));
    const double mid = 0.5 * (bp[i] + bp[i + 1]);
    const Eigen::Vector2d p0 = along_direction(s.side) == 0 ? Eigen::Vector2d(mid, edge) : Eigen::Vector2d(edge, mid);
    const Eigen::Vector2d p1 = along_direction(s.side) == 0 ? Eigen::Vector2d(mid, inner) : Eigen::Vector2d(inner, mid);
    across = std::max(across, (geo.point(p1.x(), p1.y()) - geo.point(p0.x(), p0.y())).norm());
  }
  return std::min(along, across);
}

}  // namespace

const char* to_string(Side side) {
  switch (side) {
    case Side::West: return "west";
    case Side::East: return "east";
    case Side::South: return "south";
    case Side::North: return "north";
  }
  return "?";
}

const char* to_string(JunctionKind kind) {
  return kind == JunctionKind::Corner ? "corner" : "t-junction";
}

Eigen::Vector2d side_parameter(Side side, double t) {
  switch (side) {
    case Side::West: return {0.0, t};
    case Side::East: return {1.0, t};
    case Side::South: return {t, 0.0};
    case Side::North: return {t, 1.0};
  }
  return {0.0, 0.0};
}

Eigen::Vector2d parametric_outward_normal(Side side) {
  switch (side) {
    case Side::West: return {-1.0, 0.0};
    case Side::East: return {1.0, 0.0};
    case Side::South: return {0.0, -1.0};
    case Side::North: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

EdgeProjection project_to_edge(const GeometryMap& geo, Side side, const Eigen::Vector2d& x,
                               std::optional<double> guess) {
  double best_t = 0.0, best_d = std::numeric_limits<double>::infinity();
  if (guess) {
    best_t = std::clamp(*guess, 0.0, 1.0);
    best_d = (edge_point(geo, side, best_t) - x).norm();
  }
  if (!guess || best_d > 1e-3 * geo.diameter()) {
    constexpr int samples = 32;
    for (int i = 0; i <= samples; ++i) {
      const double t = static_cast<double>(i) / samples;
      const double d = (edge_point(geo, side, t) - x).norm();
      if (d < best_d) {
        best_d = d;
        best_t = t;
      }
    }
  }
  double t = best_t;
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d c = edge_point(geo, side, t);
    const Eigen::Vector2d dc = edge_tangent(geo, side, t);
    const double step = dc.dot(c - x) / dc.squaredNorm();
    const double next = std::clamp(t - step, 0.0, 1.0);
    const bool done = std::abs(next - t) < 1e-15;
    t = next;
    if (done) break;
  }
  return {t, (edge_point(geo, side, t) - x).norm()};
}

double edge_length(const GeometryMap& geo, Side side, double a, double b) {
  static const QuadratureRule rule = quadrature_rule(12);
  const QuadratureRule q = map_rule(rule, a, b);
  double len = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    len += q.weights[i] * edge_tangent(geo, side, q.nodes[i]).norm();
  return len;
}

double InterfaceView::neighbor_guess(double t) const {
  const double s = (t - own.begin) / (own.end - own.begin);
  return reversed ? neighbor.end - s * (neighbor.end - neighbor.begin)
                  : neighbor.begin + s * (neighbor.end - neighbor.begin);
}

std::vector<Interface> detect_interfaces(std::span<const GeometryMap> patches, double tol) {
  check_non_overlapping(patches, tol);
  const int n = static_cast<int>(patches.size());
  std::vector<Interface> out;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      if (!boxes_touch(patches[k], patches[l], tol)) continue;
      for (Side a : kAllSides)
        for (Side b : kAllSides)
          if (auto iface = match_edges(patches, k, a, l, b, tol)) out.push_back(*iface);
    }

  // one neighbor per point of every side
  for (int k = 0; k < n; ++k)
    for (Side s : kAllSides) {
      std::vector<std::pair<double, double>> spans;
      for (const Interface& i : out) {
        if (i.first.patch == k && i.first.side == s) spans.emplace_back(i.first.begin, i.first.end);
        if (i.second.patch == k && i.second.side == s)
          spans.emplace_back(i.second.begin, i.second.end);
      }
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i].first < spans[i - 1].second - kParamTol) {
          std::ostringstream msg;
          msg << "side " << to_string(s) << " of patch " << k
              << " is matched to overlapping interface segments";
          throw TopologyError(msg.str());
        }
    }
  return out;
}

std::vector<Junction> detect_junctions(std::span<const GeometryMap> patches,
                                       std::span<const Interface> interfaces,
                                       std::span<const PatchSide> dirichlet, double tol) {
  std::vector<Eigen::Vector2d> points;
  auto add_unique = [&](const Eigen::Vector2d& x) {
    for (const auto& p : points)
      if ((p - x).norm() < tol) return;
    points.push_back(x);
  };
  for (const Interface& i : interfaces) {
    const GeometryMap& g = patches[i.first.patch];
    add_unique(edge_point(g, i.first.side, i.first.begin));
    add_unique(edge_point(g, i.first.side, i.first.end));
  }

  std::vector<Junction> out;
  for (const Eigen::Vector2d& x : points) {
    bool on_boundary = false;
    for (const PatchSide& d : dirichlet)
      if (project_to_edge(patches[d.patch], d.side, x).distance < tol) {
        on_boundary = true;
        break;
      }
    if (on_boundary) continue;

    Junction j;
    j.point = x;
    for (int k = 0; k < static_cast<int>(patches.size()); ++k)
      for (Side s : kAllSides) {
        const EdgeProjection pr = project_to_edge(patches[k], s, x);
        if (pr.distance >= tol) continue;
        j.incident.push_back({k, s, pr.t});
        const bool at_end = (edge_point(patches[k], s, 0.0) - x).norm() < tol ||
                            (edge_point(patches[k], s, 1.0) - x).norm() < tol;
        if (!at_end) j.kind = JunctionKind::TJunction;
      }
    out.push_back(std::move(j));
  }
  return out;
}

MultiPatch::MultiPatch(std::vector<GeometryMap> patches, double relative_tol)
    : geometries_(std::move(patches)) {
  if (geometries_.empty()) throw TopologyError("MultiPatch: no patches");
  Eigen::Vector2d lo = geometries_.front().bounding_box().first, hi = lo;
  for (const auto& g : geometries_) {
    g.check_orientation();
    const auto [a, b] = g.bounding_box();
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(b);
  }
  diameter_ = (hi - lo).norm();
  tol_ = relative_tol * diameter_;

  interfaces_ = detect_interfaces(geometries_, tol_);

  for (int k = 0; k < num_patches(); ++k)
    for (Side s : kAllSides) {
      std::vector<std::pair<double, double>> spans;
      for (const InterfaceView& v : interfaces_of(k))
        if (v.own.side == s) spans.emplace_back(v.own.begin, v.own.end);
      if (spans.empty()) {
        dirichlet_.push_back({k, s});
        continue;
      }
      std::sort(spans.begin(), spans.end());
      double covered = 0.0;
      for (const auto& [a, b] : spans) {
        if (a > covered + kParamTol) break;
        covered = std::max(covered, b);
      }
      if (covered < 1.0 - kParamTol) {
        std::ostringstream msg;
        msg << "side " << to_string(s) << " of patch " << k
            << " is only partially covered by interfaces";
        throw TopologyError(msg.str());
      }
    }

  junctions_ = detect_junctions(geometries_, interfaces_, dirichlet_, tol_);
  for (const auto& g : geometries_) spaces_.push_back(g.space());
}

MultiPatch MultiPatch::with_spaces(std::vector<TensorSplineSpace> spaces) const {
  if (static_cast<int>(spaces.size()) != num_patches())
    throw Error("MultiPatch::with_spaces: one space per patch required");
  MultiPatch out = *this;
  out.spaces_ = std::move(spaces);
  for (Interface& i : out.interfaces_) {
    const double hk = side_mesh_size(out.geometries_[i.first.patch], out.spaces_[i.first.patch], i.first);
    const double hl =
        side_mesh_size(out.geometries_[i.second.patch], out.spaces_[i.second.patch], i.second);
    i.mesh_size = std::min(hk, hl);
  }
  return out;
}

MultiPatch MultiPatch::discretize(int degree, int refinement, int smoothness) const {
  const KnotVector kv = make_knot_vector(degree, refinement, smoothness);
  return with_spaces(std::vector<TensorSplineSpace>(num_patches(), TensorSplineSpace(kv, kv)));
}

bool MultiPatch::is_dirichlet(int patch, Side side) const {
  return std::find(dirichlet_.begin(), dirichlet_.end(), PatchSide{patch, side}) != dirichlet_.end();
}

std::vector<InterfaceView> MultiPatch::interfaces_of(int k) const {
  std::vector<InterfaceView> out;
  for (int i = 0; i < static_cast<int>(interfaces_.size()); ++i) {
    const Interface& f = interfaces_[i];
    if (f.first.patch == k) out.push_back({i, f.first, f.second, f.reversed, f.mesh_size});
    if (f.second.patch == k) out.push_back({i, f.second, f.first, f.reversed, f.mesh_size});
  }
  return out;
}

std::vector<int> MultiPatch::neighbors(int k) const {
  std::vector<int> out;
  for (const InterfaceView& v : interfaces_of(k)) out.push_back(v.neighbor.patch);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ietidp
