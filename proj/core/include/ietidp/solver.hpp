#pragma once

// End-to-end IETI-DP solve of the SIPG system on a discretized multipatch.

#include "ietidp/assembly.hpp"
#include "ietidp/multipatch.hpp"
#include "ietidp/operators.hpp"
#include "ietidp/pcg.hpp"
#include "ietidp/schur.hpp"
#include "ietidp/skeleton.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace ietidp {

struct SolverOptions {
  AssemblyOptions assembly;
  double rtol = 1e-8;
  int maxit = 500;
  int threads = 1;
  PrimalSelection primal;
  /// Estimate kappa from an extra PCG run started from a seeded random
  /// right-hand side. The load vector of a symmetric problem only sees part
  /// of the spectrum, which biases the estimate from the actual solve low.
  bool kappa_probe = true;
  unsigned probe_seed = 20210;
};

struct SolveTimings {
  double assembly = 0.0;
  double setup = 0.0;  ///< Schur factorizations, classification, operators
  double solve = 0.0;
  double recovery = 0.0;
};

struct SolveReport {
  Eigen::VectorXd lambda;
  /// Per patch: coefficients in the extended ordering (own + artificial).
  std::vector<Eigen::VectorXd> extended;
  /// Per patch: coefficients of the full tensor space, zero on the Dirichlet boundary.
  std::vector<Eigen::VectorXd> coefficients;
  int iterations = 0;
  bool converged = false;
  /// Lanczos estimate of kappa(M_sD F): from the probe run if enabled,
  /// otherwise from the solve.
  double kappa = 1.0;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  /// Lanczos estimate from the solve itself.
  double kappa_solve = 1.0;
  int probe_iterations = 0;
  std::vector<double> residuals;
  /// max |B w| over all multipliers.
  double max_jump = 0.0;
  int num_dofs = 0;  ///< sum of own patch DOFs after Dirichlet elimination
  int num_multipliers = 0;
  int coarse_size = 0;
  SolveTimings timings;
};

/// Structured one-line record (JSON) of the scalar report fields.
std::string to_json(const SolveReport& report);

class IetiSolver {
 public:
  /// Assembles, classifies and builds the operators. `mp` must outlive the solver.
  IetiSolver(const MultiPatch& mp, const SourceFunction& f, const SolverOptions& options = {});

  SolveReport solve() const;

  const MultiPatch& multipatch() const { return *mp_; }
  const SolverOptions& options() const { return options_; }
  const std::vector<LocalSystem>& systems() const { return systems_; }
  const std::vector<LocalSchur>& schurs() const { return schurs_; }
  const SkeletonDofTable& table() const { return table_; }
  const IetiOperators& operators() const { return *operators_; }

 private:
  const MultiPatch* mp_;
  SolverOptions options_;
  std::vector<LocalSystem> systems_;
  std::vector<LocalSchur> schurs_;
  SkeletonDofTable table_;
  std::unique_ptr<IetiOperators> operators_;
  SolveTimings setup_times_;
};

}  // namespace ietidp
