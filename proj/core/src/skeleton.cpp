#include "ietidp/skeleton.hpp"

#include "ietidp/error.hpp"

#include <cmath>
#include <sstream>

namespace ietidp {

std::vector<int> SkeletonDofTable::primal_dofs(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(class_of[k].size()); ++i)
    if (classes[class_of[k][i]].primal) out.push_back(i);
  return out;
}

std::vector<int> SkeletonDofTable::dual_dofs(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(class_of[k].size()); ++i)
    if (!classes[class_of[k][i]].primal) out.push_back(i);
  return out;
}

int SkeletonDofTable::num_multipliers() const {
  int n = 0;
  for (const DofClass& c : classes)
    if (!c.primal) n += c.multiplicity() - 1;
  return n;
}

namespace {

// Junction parameters come from a projection; snap them onto knots so that
// functions vanishing there are not flagged by round-off.
double snap_to_breakpoint(const KnotVector& kv, double t) {
  for (double b : kv.breakpoints())
    if (std::abs(b - t) < 1e-10) return b;
  return t;
}

}  // namespace

SkeletonDofTable classify_dofs(const MultiPatch& mp, std::span<const ExtendedSpaceIndex> index,
                               const PrimalSelection& policy) {
  const int np = mp.num_patches();
  if (static_cast<int>(index.size()) != np) throw InternalError("classify_dofs: one index per patch");
  SkeletonDofTable table;
  table.class_of.resize(np);
  std::vector<std::vector<int>> owner_class(np);  // tensor -> class

  for (int k = 0; k < np; ++k) {
    const ExtendedSpaceIndex& idx = index[k];
    table.class_of[k].assign(idx.num_skeleton(), -1);
    owner_class[k].assign(mp.space(k).size(), -1);
    for (int e = idx.num_interior; e < idx.num_own(); ++e) {
      DofClass c;
      c.owner_patch = k;
      c.owner_basis = idx.own_basis[e];
      c.members.push_back({k, e - idx.num_interior});
      owner_class[k][c.owner_basis] = static_cast<int>(table.classes.size());
      table.class_of[k][e - idx.num_interior] = static_cast<int>(table.classes.size());
      table.classes.push_back(std::move(c));
    }
  }
  for (int k = 0; k < np; ++k) {
    const ExtendedSpaceIndex& idx = index[k];
    for (int a = 0; a < static_cast<int>(idx.artificial.size()); ++a) {
      const ArtificialDof& art = idx.artificial[a];
      const int c = owner_class[art.neighbor][art.basis];
      if (c < 0) throw InternalError("classify_dofs: artificial DOF without owner");
      const int local = idx.num_own() + a - idx.num_interior;
      table.classes[c].members.push_back({k, local});
      table.class_of[k][local] = c;
    }
  }
  for (const DofClass& c : table.classes)
    if (c.multiplicity() < 2) {
      std::ostringstream msg;
      msg << "boundary function " << c.owner_basis << " of patch " << c.owner_patch
          << " is not copied to any neighbor";
      throw ClassificationError(msg.str());
    }

  Eigen::MatrixXd buf;
  for (const Junction& j : mp.junctions()) {
    const bool wanted = j.kind == JunctionKind::TJunction ? policy.t_junctions : policy.corners;
    if (!wanted) continue;
    for (const JunctionIncidence& inc : j.incident) {
      const TensorSplineSpace& s = mp.space(inc.patch);
      const KnotVector& kv = s.direction(along_direction(inc.side));
      buf.resize(1, kv.degree() + 1);
      const int first = kv.evaluate(snap_to_breakpoint(kv, inc.param), 0, buf);
      for (int a = 0; a <= kv.degree(); ++a) {
        if (std::abs(buf(0, a)) <= 1e-12) continue;
        const int c = owner_class[inc.patch][trace_to_tensor(s, inc.side, first + a)];
        if (c >= 0) table.classes[c].primal = true;  // Dirichlet functions have no class
      }
    }
  }
  for (DofClass& c : table.classes)
    if (c.primal) c.coarse = table.num_coarse++;
  return table;
}

}  // namespace ietidp
