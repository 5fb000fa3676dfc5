#pragma once

// Dual-primal operators: constraint selectors C, energy-minimizing primal
// basis Psi, coarse matrix Psi^T S Psi, jump matrix B, multiplicities D and
// the actions of F and of the scaled Dirichlet preconditioner.

#include "ietidp/assembly.hpp"
#include "ietidp/schur.hpp"
#include "ietidp/skeleton.hpp"
#include "ietidp/sparse_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace ietidp {

/// One skeleton vector per patch.
using PatchVectors = std::vector<Eigen::VectorXd>;

class IetiOperators {
 public:
  /// `systems`, `schurs` and `table` must outlive the operators. Throws
  /// OperatorError if a constrained local system or the coarse matrix is
  /// singular.
  IetiOperators(std::span<const LocalSystem> systems, std::span<const LocalSchur> schurs,
                const SkeletonDofTable& table, int threads = 1);

  int num_patches() const { return static_cast<int>(patches_.size()); }
  int num_multipliers() const { return num_lambda_; }
  int coarse_size() const { return static_cast<int>(coarse_.rows()); }
  int skeleton_size(int k) const { return patches_[k].n_skeleton; }

  /// C^{(k)}: rows select the primal skeleton entries of patch k.
  Eigen::MatrixXd constraint(int k) const;
  /// Psi^{(k)} on the skeleton, one column per local primal DOF.
  const Eigen::MatrixXd& psi(int k) const { return patches_[k].psi; }
  /// Coarse index of each local primal DOF of patch k.
  const std::vector<int>& coarse_map(int k) const { return patches_[k].coarse; }
  const Eigen::MatrixXd& coarse_matrix() const { return coarse_; }
  /// B^{(k)} (num_multipliers x skeleton_size(k)).
  const Eigen::SparseMatrix<double>& jump(int k) const { return patches_[k].b; }
  /// Diagonal of D^{(k)}.
  const Eigen::VectorXd& multiplicity(int k) const { return patches_[k].mult; }

  PatchVectors apply_Bt(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd apply_B(const PatchVectors& w) const;
  /// Partially assembled inverse: constrained local solves plus the coarse
  /// correction, w = Ktilde y + Psi Kc^{-1} Psi^T y.
  PatchVectors apply_P(const PatchVectors& y) const;

  Eigen::VectorXd apply_F(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd compute_d() const;
  Eigen::VectorXd apply_MsD(const Eigen::VectorXd& lambda) const;
  /// w = P (g - B^T lambda).
  PatchVectors skeleton_solution(const Eigen::VectorXd& lambda) const;

 private:
  struct Patch {
    int n_interior = 0;
    int n_skeleton = 0;
    std::vector<int> primal, dual;  // skeleton-local
    std::vector<int> coarse;
    SparseCholesky a_rr;
    Eigen::MatrixXd psi;
    Eigen::SparseMatrix<double> b;
    Eigen::VectorXd mult;
  };

  std::vector<const LocalSchur*> schurs_;
  std::vector<Patch> patches_;
  Eigen::MatrixXd coarse_;
  Eigen::LLT<Eigen::MatrixXd> coarse_llt_;
  int num_lambda_ = 0;
  int threads_ = 1;
};

}  // namespace ietidp
