#include "ietidp/operators.hpp"

#include "ietidp/error.hpp"
#include "ietidp/parallel.hpp"

#include <sstream>

namespace ietidp {

IetiOperators::IetiOperators(std::span<const LocalSystem> systems, std::span<const LocalSchur> schurs,
                             const SkeletonDofTable& table, int threads)
    : threads_(threads) {
  const int np = table.num_patches();
  if (static_cast<int>(systems.size()) != np || static_cast<int>(schurs.size()) != np)
    throw InternalError("IetiOperators: size mismatch");
  for (const LocalSchur& s : schurs) schurs_.push_back(&s);
  patches_.resize(np);

  // B rows: owner against each artificial copy, dual classes only
  std::vector<std::vector<Eigen::Triplet<double>>> trip(np);
  for (const DofClass& c : table.classes) {
    if (c.primal) continue;
    for (std::size_t m = 1; m < c.members.size(); ++m) {
      trip[c.members[0].patch].emplace_back(num_lambda_, c.members[0].local, 1.0);
      trip[c.members[m].patch].emplace_back(num_lambda_, c.members[m].local, -1.0);
      ++num_lambda_;
    }
  }

  std::vector<Eigen::MatrixXd> local_coarse(np);
  parallel_for(np, threads_, [&](int k) {
    Patch& p = patches_[k];
    const LocalSystem& sys = systems[k];
    p.n_interior = sys.num_interior();
    p.n_skeleton = sys.num_skeleton();
    p.primal = table.primal_dofs(k);
    p.dual = table.dual_dofs(k);
    for (int i : p.primal) p.coarse.push_back(table.class_at(k, i).coarse);
    p.mult.resize(p.n_skeleton);
    for (int i = 0; i < p.n_skeleton; ++i) p.mult(i) = table.multiplicity(k, i);
    p.b.resize(num_lambda_, p.n_skeleton);
    p.b.setFromTriplets(trip[k].begin(), trip[k].end());

    std::vector<int> r, pi;
    for (int i = 0; i < p.n_interior; ++i) r.push_back(i);
    for (int i : p.dual) r.push_back(p.n_interior + i);
    for (int i : p.primal) pi.push_back(p.n_interior + i);
    if (!p.a_rr.compute(submatrix(sys.matrix, r, r))) {
      std::ostringstream msg;
      msg << "constrained local system of patch " << k << " is singular with " << pi.size()
          << " primal constraints";
      throw OperatorError(msg.str());
    }
    const Eigen::MatrixXd a_rp = Eigen::MatrixXd(submatrix(sys.matrix, r, pi));
    const Eigen::MatrixXd a_pp = Eigen::MatrixXd(submatrix(sys.matrix, pi, pi));
    const Eigen::MatrixXd psi_r = -p.a_rr.solve(a_rp);
    local_coarse[k] = a_pp + a_rp.transpose() * psi_r;

    const int nd = static_cast<int>(p.dual.size());
    p.psi = Eigen::MatrixXd::Zero(p.n_skeleton, pi.size());
    for (int i = 0; i < nd; ++i) p.psi.row(p.dual[i]) = psi_r.row(p.n_interior + i);
    for (int j = 0; j < static_cast<int>(p.primal.size()); ++j) p.psi(p.primal[j], j) = 1.0;
  });

  coarse_ = Eigen::MatrixXd::Zero(table.num_coarse, table.num_coarse);
  for (int k = 0; k < np; ++k) {
    const std::vector<int>& c = patches_[k].coarse;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) coarse_(c[i], c[j]) += local_coarse[k](i, j);
  }
  if (table.num_coarse > 0) {
    coarse_llt_.compute(coarse_);
    if (coarse_llt_.info() != Eigen::Success)
      throw OperatorError("coarse matrix is not positive definite (insufficient primal space)");
  }
}

Eigen::MatrixXd IetiOperators::constraint(int k) const {
  const Patch& p = patches_[k];
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p.primal.size(), p.n_skeleton);
  for (std::size_t i = 0; i < p.primal.size(); ++i) c(i, p.primal[i]) = 1.0;
  return c;
}

PatchVectors IetiOperators::apply_Bt(const Eigen::VectorXd& lambda) const {
  PatchVectors out(num_patches());
  for (int k = 0; k < num_patches(); ++k) out[k] = patches_[k].b.transpose() * lambda;
  return out;
}

Eigen::VectorXd IetiOperators::apply_B(const PatchVectors& w) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_lambda_);
  for (int k = 0; k < num_patches(); ++k) out += patches_[k].b * w[k];
  return out;
}

PatchVectors IetiOperators::apply_P(const PatchVectors& y) const {
  const int np = num_patches();
  PatchVectors out(np);
  parallel_for(np, threads_, [&](int k) {
    const Patch& p = patches_[k];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.n_interior + p.dual.size());
    for (std::size_t i = 0; i < p.dual.size(); ++i) rhs(p.n_interior + i) = y[k](p.dual[i]);
    const Eigen::VectorXd x = p.a_rr.solve(rhs);
    out[k] = Eigen::VectorXd::Zero(p.n_skeleton);
    for (std::size_t i = 0; i < p.dual.size(); ++i) out[k](p.dual[i]) = x(p.n_interior + i);
  });
  if (coarse_size() == 0) return out;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(coarse_size());
  for (int k = 0; k < np; ++k) {
    const Eigen::VectorXd local = patches_[k].psi.transpose() * y[k];
    for (std::size_t i = 0; i < patches_[k].coarse.size(); ++i) c(patches_[k].coarse[i]) += local(i);
  }
  c = coarse_llt_.solve(c);
  for (int k = 0; k < np; ++k) {
    const Patch& p = patches_[k];
    Eigen::VectorXd local(p.coarse.size());
    for (std::size_t i = 0; i < p.coarse.size(); ++i) local(i) = c(p.coarse[i]);
    out[k] += p.psi * local;
  }
  return out;
}

Eigen::VectorXd IetiOperators::apply_F(const Eigen::VectorXd& lambda) const {
  return apply_B(apply_P(apply_Bt(lambda)));
}

Eigen::VectorXd IetiOperators::compute_d() const {
  PatchVectors g(num_patches());
  for (int k = 0; k < num_patches(); ++k) g[k] = schurs_[k]->reduced_rhs();
  return apply_B(apply_P(g));
}

Eigen::VectorXd IetiOperators::apply_MsD(const Eigen::VectorXd& lambda) const {
  PatchVectors y = apply_Bt(lambda);
  parallel_for(num_patches(), threads_, [&](int k) {
    const Eigen::VectorXd& d = patches_[k].mult;
    y[k] = schurs_[k]->apply(y[k].cwiseQuotient(d)).cwiseQuotient(d);
  });
  return apply_B(y);
}

PatchVectors IetiOperators::skeleton_solution(const Eigen::VectorXd& lambda) const {
  PatchVectors y = apply_Bt(lambda);
  for (int k = 0; k < num_patches(); ++k) y[k] = schurs_[k]->reduced_rhs() - y[k];
  return apply_P(y);
}

}  // namespace ietidp
