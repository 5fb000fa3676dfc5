#include "ietidp/pcg.hpp"

#include "ietidp/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace ietidp {

Eigen::VectorXd lanczos_ritz_values(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const int m = static_cast<int>(alpha.size());
  if (m == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd diag(m), off(std::max(m - 1, 0));
  for (int j = 0; j < m; ++j) {
    diag(j) = 1.0 / alpha[j];
    if (j > 0) diag(j) += beta[j - 1] / alpha[j - 1];
    if (j + 1 < m) off(j) = std::sqrt(beta[j]) / alpha[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

PcgResult solve_pcg(const LinearOperator& apply_a, const LinearOperator& apply_m, const Eigen::VectorXd& b,
                    double rtol, int maxit) {
  if (!(rtol > 0.0 && rtol < 1.0)) throw ConfigError("PCG tolerance must lie in (0, 1)");
  PcgResult res;
  res.x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = apply_m(r);
  const double z0 = z.norm();
  res.residuals.push_back(1.0);
  if (z0 == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  std::vector<double> alpha, beta;
  while (res.iterations < maxit) {
    const Eigen::VectorXd ap = apply_a(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) {
      std::ostringstream msg;
      msg << "PCG: non-positive curvature " << curvature << " at iteration " << res.iterations;
      throw OperatorError(msg.str());
    }
    const double a = rz / curvature;
    alpha.push_back(a);
    res.x += a * p;
    r -= a * ap;
    z = apply_m(r);
    ++res.iterations;
    const double rel = z.norm() / z0;
    res.residuals.push_back(rel);
    if (rel <= rtol) {
      res.converged = true;
      break;
    }
    const double rz_new = r.dot(z);
    const double bt = rz_new / rz;
    beta.push_back(bt);
    rz = rz_new;
    p = z + bt * p;
  }
  const Eigen::VectorXd ritz = lanczos_ritz_values(alpha, beta);
  if (ritz.size() > 0) {
    res.lambda_min = ritz(0);
    res.lambda_max = ritz(ritz.size() - 1);
    res.kappa = res.lambda_max / res.lambda_min;
  }
  return res;
}

}  // namespace ietidp
