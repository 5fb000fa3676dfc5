#include "ietidp/sparse_solver.hpp"

#include "ietidp/error.hpp"

#ifdef IETIDP_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

#include <vector>

namespace ietidp {

struct SparseCholesky::Impl {
#ifdef IETIDP_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#else
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
#endif
};

SparseCholesky::SparseCholesky() = default;
SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

bool SparseCholesky::compute(const Eigen::SparseMatrix<double>& a) {
  if (a.rows() != a.cols()) throw InternalError("SparseCholesky: matrix must be square");
  rows_ = static_cast<int>(a.rows());
  impl_.reset();
  if (rows_ == 0) return true;
  impl_ = std::make_unique<Impl>();
#ifdef IETIDP_HAVE_CHOLMOD
  impl_->llt.cholmod().print = 0;  // failures are reported through info()
#endif
  impl_->llt.compute(a);
  return impl_->llt.info() == Eigen::Success;
}

Eigen::VectorXd SparseCholesky::solve(const Eigen::VectorXd& b) const {
  if (rows_ == 0) return Eigen::VectorXd(0);
  return impl_->llt.solve(b);
}

Eigen::MatrixXd SparseCholesky::solve(const Eigen::MatrixXd& b) const {
  if (rows_ == 0 || b.cols() == 0) return Eigen::MatrixXd(rows_, b.cols());
  return impl_->llt.solve(b);
}

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& a,
                                      const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> row_pos(a.rows(), -1);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) row_pos[rows[i]] = i;
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, cols[j]); it; ++it)
      if (row_pos[it.row()] >= 0) trip.emplace_back(row_pos[it.row()], j, it.value());
  Eigen::SparseMatrix<double> out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace ietidp
