#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace ietidp {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  /// ||M r_k|| / ||M r_0||, starting with 1.
  std::vector<double> residuals;
  /// Extreme Ritz values of the Lanczos matrix and their ratio.
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;
};

/// Preconditioned CG with zero initial guess; stops once the preconditioned
/// residual norm has dropped by `rtol`. Throws OperatorError on non-positive
/// curvature.
PcgResult solve_pcg(const LinearOperator& apply_a, const LinearOperator& apply_m, const Eigen::VectorXd& b,
                    double rtol, int maxit);

/// Eigenvalues of the Lanczos tridiagonal built from CG step lengths alpha and
/// beta (beta[j] couples steps j and j+1), ascending.
Eigen::VectorXd lanczos_ritz_values(const std::vector<double>& alpha, const std::vector<double>& beta);

}  // namespace ietidp
