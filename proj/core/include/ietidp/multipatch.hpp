#pragma once

// Multi-patch topology: patches, (partial-edge) interfaces and junctions,
// plus generators for the ring and square test domains.

#include "ietidp/bspline.hpp"

#include <Eigen/Core>

#include <array>
#include <compare>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ietidp {

/// Patch edges. West/East are u = 0/1 (parametrized by v), South/North are
/// v = 0/1 (parametrized by u).
enum class Side : int { West = 0, East = 1, South = 2, North = 3 };

inline constexpr std::array<Side, 4> kAllSides{Side::West, Side::East, Side::South, Side::North};

const char* to_string(Side side);

/// Parameter direction (0 = u, 1 = v) that varies along the side.
inline int along_direction(Side s) { return (s == Side::West || s == Side::East) ? 1 : 0; }
inline int normal_direction(Side s) { return 1 - along_direction(s); }
/// True for East/North, i.e. the side lies at parameter 1.
inline bool is_upper(Side s) { return s == Side::East || s == Side::North; }

/// (u,v) of the point with edge parameter t on `side`.
Eigen::Vector2d side_parameter(Side side, double t);
/// Outward unit normal of the unit square on `side`.
Eigen::Vector2d parametric_outward_normal(Side side);

struct PatchSide {
  int patch = 0;
  Side side = Side::West;
  auto operator<=>(const PatchSide&) const = default;
};

/// Closest point on a patch edge.
struct EdgeProjection {
  double t = 0.0;
  double distance = 0.0;
};

EdgeProjection project_to_edge(const GeometryMap& geo, Side side, const Eigen::Vector2d& x,
                               std::optional<double> guess = std::nullopt);

/// Arc length of the edge image between parameters a and b.
double edge_length(const GeometryMap& geo, Side side, double a, double b);

struct InterfaceSide {
  int patch = 0;
  Side side = Side::West;
  double begin = 0.0;  ///< subinterval [begin,end] of the edge parameter
  double end = 1.0;
};

/// Common boundary segment of two patches.
struct Interface {
  InterfaceSide first;
  InterfaceSide second;
  /// Edge parameter of `second` decreases while that of `first` increases.
  bool reversed = false;
  double length = 0.0;
  /// h_{kl}: smaller of the two sides' physical element sizes along the
  /// interface. Zero until discretization spaces are attached.
  double mesh_size = 0.0;
};

/// An interface seen from one of its patches.
struct InterfaceView {
  int interface = 0;
  InterfaceSide own;
  InterfaceSide neighbor;
  bool reversed = false;
  double mesh_size = 0.0;

  /// Linear guess for the neighbor parameter of own parameter t; exact for
  /// affinely related parametrizations.
  double neighbor_guess(double t) const;
};

enum class JunctionKind { Corner, TJunction };

const char* to_string(JunctionKind kind);

struct JunctionIncidence {
  int patch = 0;
  Side side = Side::West;
  double param = 0.0;
};

/// Interface endpoint that is not on the Dirichlet boundary.
struct Junction {
  Eigen::Vector2d point;
  std::vector<JunctionIncidence> incident;
  JunctionKind kind = JunctionKind::Corner;
};

/// Interfaces between all pairs of patch edges sharing a segment of
/// positive length. Throws TopologyError for overlapping patches or for
/// overlapping subintervals on one side.
std::vector<Interface> detect_interfaces(std::span<const GeometryMap> patches, double tol);

std::vector<Junction> detect_junctions(std::span<const GeometryMap> patches,
                                       std::span<const Interface> interfaces,
                                       std::span<const PatchSide> dirichlet, double tol);

class MultiPatch {
 public:
  /// Detects interfaces and junctions. Sides without interfaces form the
  /// Dirichlet boundary. `relative_tol` is scaled by the domain diameter.
  explicit MultiPatch(std::vector<GeometryMap> patches, double relative_tol = 1e-8);

  /// Copy with per-patch discretization spaces; recomputes mesh sizes.
  MultiPatch with_spaces(std::vector<TensorSplineSpace> spaces) const;
  /// Same uniform space (degree p, 2^r elements, C^s) on every patch.
  MultiPatch discretize(int degree, int refinement, int smoothness) const;

  int num_patches() const { return static_cast<int>(geometries_.size()); }
  const GeometryMap& geometry(int k) const { return geometries_.at(k); }
  std::span<const GeometryMap> geometries() const { return geometries_; }
  const TensorSplineSpace& space(int k) const { return spaces_.at(k); }
  std::span<const Interface> interfaces() const { return interfaces_; }
  std::span<const Junction> junctions() const { return junctions_; }
  std::span<const PatchSide> dirichlet_sides() const { return dirichlet_; }
  bool is_dirichlet(int patch, Side side) const;

  double tolerance() const { return tol_; }
  double diameter() const { return diameter_; }

  /// Interfaces touching patch k, oriented from k's side.
  std::vector<InterfaceView> interfaces_of(int k) const;
  /// N_Gamma(k).
  std::vector<int> neighbors(int k) const;

 private:
  MultiPatch() = default;

  std::vector<GeometryMap> geometries_;
  std::vector<TensorSplineSpace> spaces_;
  std::vector<Interface> interfaces_;
  std::vector<Junction> junctions_;
  std::vector<PatchSide> dirichlet_;
  double tol_ = 0.0;
  double diameter_ = 0.0;
};

// --- generators -------------------------------------------------------------

/// Annulus 1 <= |x| <= 2 made of concentric layers (innermost first). Layer i
/// is split into `sectors_per_layer[i]` equal sectors starting at angle
/// `angular_offsets[i]` (radians). Widths must sum to 1 and sectors span at
/// most 90 degrees.
MultiPatch build_ring(const std::vector<double>& layer_widths,
                      const std::vector<int>& sectors_per_layer,
                      const std::vector<double>& angular_offsets);

/// Default ring: 5 layers of width 0.2, 4 sectors each, offsets alternating
/// 0 / 45 degrees (T-junctions at every layer boundary).
MultiPatch default_ring();
/// Same layout with the second layer thinned to 0.02 and the remaining four
/// layers widened to 0.245.
MultiPatch thin_gap_ring();
/// Two layers of four staggered sectors (8 patches).
MultiPatch mini_ring();

struct Rect {
  double x0, y0, x1, y1;
};

/// Unit square cut into axis-aligned rectangles. Throws TopologyError if the
/// rectangles do not cover the square exactly.
MultiPatch build_square_tgrid(const std::vector<Rect>& splits);
/// One wide rectangle over two narrow ones: a single T-junction at (1/2,1/2).
MultiPatch three_patch_tgrid();
/// Conforming nx-by-ny grid of the unit square.
MultiPatch square_grid(int nx, int ny);

// --- text output ------------------------------------------------------------

/// JSON document (schema "ietidp.multipatch/1") with control nets, spaces,
/// interfaces, junctions and Dirichlet sides.
std::string multipatch_to_json(const MultiPatch& mp);
void write_multipatch(const MultiPatch& mp, const std::filesystem::path& path);

/// Plain-text boundary polylines (one closed polyline per patch) plus
/// junction markers; see docs/formats.md.
std::string boundary_polylines(const MultiPatch& mp, int samples_per_side = 32);

}  // namespace ietidp
