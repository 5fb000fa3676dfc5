#include "ietidp/error.hpp"
#include "ietidp/multipatch.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ietidp {

MultiPatch build_ring(const std::vector<double>& layer_widths,
                      const std::vector<int>& sectors_per_layer,
                      const std::vector<double>& angular_offsets) {
  const std::size_t layers = layer_widths.size();
  if (layers == 0) throw GeneratorError("build_ring: no layers");
  if (sectors_per_layer.size() != layers || angular_offsets.size() != layers)
    throw GeneratorError("build_ring: widths, sector counts and offsets must have equal length");
  for (double w : layer_widths)
    if (!(w > 0.0)) throw GeneratorError("build_ring: layer widths must be positive");
  const double total = std::accumulate(layer_widths.begin(), layer_widths.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "build_ring: layer widths sum to " << total << ", expected 1";
    throw GeneratorError(msg.str());
  }
  for (int n : sectors_per_layer)
    if (n < 4) throw GeneratorError("build_ring: sectors wider than 90 degrees are not exact");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<GeometryMap> patches;
  double r0 = 1.0;
  for (std::size_t l = 0; l < layers; ++l) {
    // the outermost radius is pinned so the outer boundary is exactly |x| = 2
    const double r1 = (l + 1 == layers) ? 2.0 : r0 + layer_widths[l];
    const int n = sectors_per_layer[l];
    for (int j = 0; j < n; ++j) {
      const double t0 = angular_offsets[l] + two_pi * j / n;
      const double t1 = angular_offsets[l] + two_pi * (j + 1) / n;
      patches.push_back(GeometryMap::annular_sector(r0, r1, t0, t1));
    }
    r0 = r1;
  }
  return MultiPatch(std::move(patches));
}

MultiPatch default_ring() {
  const double q = std::numbers::pi / 4;
  return build_ring({0.2, 0.2, 0.2, 0.2, 0.2}, {4, 4, 4, 4, 4}, {0.0, q, 0.0, q, 0.0});
}

MultiPatch thin_gap_ring() {
  const double q = std::numbers::pi / 4;
  return build_ring({0.245, 0.02, 0.245, 0.245, 0.245}, {4, 4, 4, 4, 4}, {0.0, q, 0.0, q, 0.0});
}

MultiPatch mini_ring() {
  return build_ring({0.5, 0.5}, {4, 4}, {0.0, std::numbers::pi / 4});
}

MultiPatch build_square_tgrid(const std::vector<Rect>& splits) {
  if (splits.empty()) throw TopologyError("build_square_tgrid: no rectangles");
  std::vector<GeometryMap> patches;
  double area = 0.0;
  for (const Rect& r : splits) {
    if (r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > 1.0 || r.y1 > 1.0 || !(r.x1 > r.x0) || !(r.y1 > r.y0))
      throw TopologyError("build_square_tgrid: rectangle outside the unit square or empty");
    area += (r.x1 - r.x0) * (r.y1 - r.y0);
    patches.push_back(GeometryMap::rectangle(r.x0, r.y0, r.x1, r.y1));
  }
  if (std::abs(area - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "build_square_tgrid: rectangles cover area " << area << " instead of 1";
    throw TopologyError(msg.str());
  }
  return MultiPatch(std::move(patches));
}

MultiPatch three_patch_tgrid() {
  return build_square_tgrid({{0.0, 0.5, 1.0, 1.0}, {0.0, 0.0, 0.5, 0.5}, {0.5, 0.0, 1.0, 0.5}});
}

MultiPatch square_grid(int nx, int ny) {
  if (nx < 1 || ny < 1) throw GeneratorError("square_grid: need at least one cell per direction");
  std::vector<Rect> rects;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      rects.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny,
                       static_cast<double>(i + 1) / nx, static_cast<double>(j + 1) / ny});
  return build_square_tgrid(rects);
}

}  // namespace ietidp
