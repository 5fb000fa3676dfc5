#pragma once

// Patch-local SIPG systems on the extended spaces V_e^{(k)} (own patch
// space plus copies of the neighbors' traces on the artificial interfaces).

#include "ietidp/multipatch.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <vector>

namespace ietidp {

using SourceFunction = std::function<double(const Eigen::Vector2d&)>;

struct AssemblyOptions {
  /// Penalty parameter; the penalty weight is delta * p^2 / h_{kl}.
  double delta = 4.0;
};

/// delta * p^2 / h.
double penalty_weight(double delta, int degree, double mesh_size);

/// Copy of a neighbor's trace basis function on an artificial interface.
struct ArtificialDof {
  int interface = 0;  ///< index into MultiPatch::interfaces()
  int neighbor = 0;   ///< owning patch
  int basis = 0;      ///< owner's tensor basis index
};

/// DOF layout of V_e^{(k)}: [interior | own boundary | artificial] with
/// homogeneous Dirichlet functions removed. Interior and own-boundary blocks
/// keep tensor order; artificial DOFs are grouped by interface.
struct ExtendedSpaceIndex {
  int patch = 0;
  int num_interior = 0;
  /// Extended index -> tensor index for own DOFs (first num_interior are interior).
  std::vector<int> own_basis;
  /// Tensor index -> extended index, -1 for eliminated Dirichlet functions.
  std::vector<int> tensor_to_extended;
  std::vector<ArtificialDof> artificial;

  int num_own() const { return static_cast<int>(own_basis.size()); }
  int size() const { return num_own() + static_cast<int>(artificial.size()); }
  int num_skeleton() const { return size() - num_interior; }
  bool is_artificial(int ext) const { return ext >= num_own(); }
};

/// True if the tensor basis function touches a Dirichlet side of patch k.
bool is_dirichlet_function(const MultiPatch& mp, int k, int tensor_index);
/// Tensor index of the neighbor basis function whose trace on `side` is
/// univariate function `along_index`.
int trace_to_tensor(const TensorSplineSpace& space, Side side, int along_index);

ExtendedSpaceIndex build_extended_index(const MultiPatch& mp, int k);

/// Local system (4) of one patch.
struct LocalSystem {
  ExtendedSpaceIndex index;
  Eigen::SparseMatrix<double> matrix;  ///< symmetric, extended ordering
  Eigen::VectorXd rhs;

  int num_interior() const { return index.num_interior; }
  int num_skeleton() const { return index.num_skeleton(); }
  Eigen::SparseMatrix<double> block_II() const;
  Eigen::SparseMatrix<double> block_IG() const;
  Eigen::SparseMatrix<double> block_GG() const;
  Eigen::VectorXd rhs_interior() const { return rhs.head(num_interior()); }
  Eigen::VectorXd rhs_skeleton() const { return rhs.tail(num_skeleton()); }
};

/// Stiffness a^{(k)} and load on the full tensor space (no elimination).
struct VolumeContribution {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd load;
};

/// Element-wise tensor Gauss quadrature with (p+1)^2 points. Throws
/// DegenerateGeometryError when |det DG| < 1e-14 at a quadrature point.
VolumeContribution assemble_volume(const GeometryMap& geo, const TensorSplineSpace& space,
                                   const SourceFunction& f, int patch_id = 0);

/// m^{(k)} and r^{(k)} of one interface, in the numbering
/// [own tensor basis | neighbor_basis].
struct InterfaceContribution {
  /// Owner tensor indices of the neighbor trace functions that do not vanish
  /// on the interface (Dirichlet functions of the neighbor excluded).
  std::vector<int> neighbor_basis;
  Eigen::SparseMatrix<double> consistency;  ///< m^{(k)}
  Eigen::SparseMatrix<double> penalty;      ///< r^{(k)}
};

/// Breakpoints on own-side parameters: own knots and the images of the
/// neighbor's knots inside the interface segment, merged.
std::vector<double> interface_breakpoints(const MultiPatch& mp, const InterfaceView& view);

InterfaceContribution assemble_interface(const MultiPatch& mp, int k, const InterfaceView& view,
                                         const AssemblyOptions& options);

/// a_e^{(k)} = a^{(k)} + m^{(k)} + r^{(k)} with Dirichlet elimination.
LocalSystem assemble_local(const MultiPatch& mp, int k, const SourceFunction& f,
                           const AssemblyOptions& options);

/// Debug dump: header line "<rows> <cols> <nnz>", then "i j value" lines
/// (0-based, extended ordering), then the rhs as "rhs i value" lines.
void write_triplets(const LocalSystem& sys, std::ostream& out);

}  // namespace ietidp
