#include "ietidp/schur.hpp"

#include "ietidp/error.hpp"

#include <sstream>

namespace ietidp {

LocalSchur::LocalSchur(const LocalSystem& sys, int patch)
    : a_ii_(sys.block_II()), a_ig_(sys.block_IG()), a_gg_(sys.block_GG()), f_i_(sys.rhs_interior()) {
  if (!a_ii_factor_.compute(a_ii_)) {
    std::ostringstream msg;
    msg << "interior block of patch " << patch << " is not positive definite (penalty too small?)";
    throw CoercivityError(msg.str());
  }
  g_ = sys.rhs_skeleton() - a_ig_.transpose() * a_ii_factor_.solve(f_i_);
}

Eigen::VectorXd LocalSchur::apply(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd y = a_ii_factor_.solve(Eigen::VectorXd(a_ig_ * x));
  return a_gg_ * x - a_ig_.transpose() * y;
}

Eigen::MatrixXd LocalSchur::dense() const {
  const Eigen::MatrixXd rhs = Eigen::MatrixXd(a_ig_);
  const Eigen::MatrixXd y = a_ii_factor_.solve(rhs);
  return Eigen::MatrixXd(a_gg_) - a_ig_.transpose() * y;
}

Eigen::VectorXd LocalSchur::interior_solve(const Eigen::VectorXd& w) const {
  return a_ii_factor_.solve(Eigen::VectorXd(f_i_ - a_ig_ * w));
}

}  // namespace ietidp
