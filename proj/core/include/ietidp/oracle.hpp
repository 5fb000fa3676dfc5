#pragma once

// Brute-force references: monolithic SIPG assembly and direct solve, dense
// operator materialization and spectra, and a dense block-elimination of the
// full dual-primal saddle point system.

#include "ietidp/assembly.hpp"
#include "ietidp/multipatch.hpp"
#include "ietidp/pcg.hpp"
#include "ietidp/skeleton.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <vector>

namespace ietidp::oracle {

/// Global system over all non-Dirichlet patch functions, artificial copies
/// identified with their owners. Patch-major, tensor order inside a patch.
struct MonolithicSystem {
  std::vector<std::vector<int>> tensor_to_global;  ///< -1 for Dirichlet functions
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;

  int size() const { return static_cast<int>(rhs.size()); }
  /// Splits a global vector into full tensor coefficient vectors per patch.
  std::vector<Eigen::VectorXd> to_patches(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_patches(std::span<const Eigen::VectorXd> coefficients) const;
};

MonolithicSystem assemble_monolithic(const MultiPatch& mp, const SourceFunction& f, double delta = 4.0);

/// Sparse LDL^T solve. Throws CoercivityError if the matrix is singular or
/// the residual check fails.
Eigen::VectorXd solve_direct(const MonolithicSystem& sys);

/// Applies `op` to every unit vector.
Eigen::MatrixXd materialize(const LinearOperator& op, int n);

struct Spectrum {
  Eigen::VectorXd eigenvalues;  ///< ascending
  double lambda_min = 0.0;      ///< smallest nonzero
  double lambda_max = 0.0;
  double kappa = 0.0;
};

/// Eigenvalues of B A with A SPD and B symmetric, both given as operators.
/// Throws OperatorError if a materialized operator is not symmetric.
Spectrum dense_spectrum(const LinearOperator& apply_a, const LinearOperator& apply_b, int n);

/// Dense dual-primal quantities built without the energy-minimizing basis:
/// F and d by elimination of the full saddle system in (w, mu, w_c), and
/// M_sD = B D^{-1} S D^{-1} B^T.
struct DenseIeti {
  Eigen::MatrixXd S;    ///< block diagonal local Schur complements
  Eigen::MatrixXd B;
  Eigen::VectorXd D;
  Eigen::MatrixXd C;    ///< stacked patch selectors
  Eigen::MatrixXd R;    ///< patch primal -> coarse
  Eigen::VectorXd g;
  Eigen::MatrixXd F;
  Eigen::VectorXd d;
  Eigen::MatrixXd MsD;
  std::vector<int> offset;  ///< skeleton offset per patch
};

DenseIeti dense_ieti(std::span<const LocalSystem> systems, const SkeletonDofTable& table);

/// u_h(G_k(u,v)) for full tensor coefficients of patch k.
double evaluate(const TensorSplineSpace& space, const Eigen::VectorXd& coefficients, double u, double v);

/// ||u - u_h||_{L2} over all patches, Gauss order max(p)+3 per element.
double l2_error(const MultiPatch& mp, std::span<const Eigen::VectorXd> coefficients,
                const std::function<double(const Eigen::Vector2d&)>& exact);

}  // namespace ietidp::oracle
