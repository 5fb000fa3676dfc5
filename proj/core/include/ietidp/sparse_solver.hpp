#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

namespace ietidp {

/// Sparse Cholesky factorization of an SPD matrix (CHOLMOD supernodal when
/// available, Eigen's simplicial LLT otherwise). Empty matrices are allowed.
class SparseCholesky {
 public:
  SparseCholesky();
  ~SparseCholesky();
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  /// Returns false if the matrix is not numerically SPD.
  bool compute(const Eigen::SparseMatrix<double>& a);

  int rows() const { return rows_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int rows_ = 0;
};

/// Rows/columns `idx` of a sparse matrix.
Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& a,
                                      const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace ietidp
