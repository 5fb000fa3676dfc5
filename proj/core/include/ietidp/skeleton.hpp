#pragma once

// Skeleton DOF classes: every own boundary function of a patch together with
// its copies on the neighbors' artificial interfaces. Classes touching a
// junction are primal ("fat vertices"), the rest are dual.

#include "ietidp/assembly.hpp"
#include "ietidp/multipatch.hpp"

#include <span>
#include <vector>

namespace ietidp {

/// Skeleton DOF: `local` counts from the first skeleton entry of the patch's
/// extended ordering (extended index minus num_interior).
struct SkeletonDof {
  int patch = 0;
  int local = 0;
  bool operator==(const SkeletonDof&) const = default;
};

struct DofClass {
  int owner_patch = 0;
  int owner_basis = 0;  ///< owner's tensor index
  /// members[0] is the owner's own boundary DOF, the rest are artificial copies
  std::vector<SkeletonDof> members;
  bool primal = false;
  int coarse = -1;  ///< coarse index for primal classes

  int multiplicity() const { return static_cast<int>(members.size()); }
};

/// Which junctions contribute primal DOFs. Dropping T-junctions is only
/// meant for experiments on the necessity of the coarse space.
struct PrimalSelection {
  bool corners = true;
  bool t_junctions = true;
};

struct SkeletonDofTable {
  std::vector<DofClass> classes;
  /// class_of[k][local]
  std::vector<std::vector<int>> class_of;
  int num_coarse = 0;

  int num_patches() const { return static_cast<int>(class_of.size()); }
  const DofClass& class_at(int k, int local) const { return classes[class_of[k][local]]; }
  bool is_primal(int k, int local) const { return class_at(k, local).primal; }
  int multiplicity(int k, int local) const { return class_at(k, local).multiplicity(); }
  /// Skeleton-local indices of the primal / dual DOFs of patch k, ascending.
  std::vector<int> primal_dofs(int k) const;
  std::vector<int> dual_dofs(int k) const;
  /// Number of B rows: sum over dual classes of (multiplicity - 1).
  int num_multipliers() const;
};

/// Throws ClassificationError if some class has no artificial copy.
SkeletonDofTable classify_dofs(const MultiPatch& mp, std::span<const ExtendedSpaceIndex> index,
                               const PrimalSelection& policy = {});

}  // namespace ietidp
