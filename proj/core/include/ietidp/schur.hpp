#pragma once

// Local Schur complements S = A_GG - A_GI A_II^{-1} A_IG, applied matrix-free
// through a sparse factorization of A_II.

#include "ietidp/assembly.hpp"
#include "ietidp/sparse_solver.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace ietidp {

class LocalSchur {
 public:
  /// Throws CoercivityError if A_II is not SPD.
  explicit LocalSchur(const LocalSystem& sys, int patch = 0);

  int size() const { return static_cast<int>(a_gg_.rows()); }
  int num_interior() const { return static_cast<int>(a_ii_.rows()); }

  /// S x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Dense S (multi-right-hand-side solve).
  Eigen::MatrixXd dense() const;
  /// g = f_G - A_GI A_II^{-1} f_I.
  const Eigen::VectorXd& reduced_rhs() const { return g_; }
  /// u_I = A_II^{-1} (f_I - A_IG w).
  Eigen::VectorXd interior_solve(const Eigen::VectorXd& w) const;

 private:
  Eigen::SparseMatrix<double> a_ii_, a_ig_, a_gg_;
  Eigen::VectorXd f_i_, g_;
  SparseCholesky a_ii_factor_;
};

inline LocalSchur schur_local(const LocalSystem& sys, int patch = 0) { return LocalSchur(sys, patch); }

}  // namespace ietidp
