#pragma once

// Univariate/tensor B-spline spaces and degree-2 NURBS geometry maps.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ietidp {

inline constexpr int kMaxDegree = 15;

/// Open knot vector of degree p on [0,1], 1 <= p <= kMaxDegree.
///
/// Evaluation at a knot returns right limits, except at x = 1 where the left
/// limit is taken, so reduced-smoothness knots have a single well-defined
/// value.
class KnotVector {
 public:
  KnotVector(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  /// Number of basis functions.
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  std::span<const double> knots() const { return knots_; }

  /// Distinct knot values, ascending (includes 0 and 1).
  std::vector<double> breakpoints() const;
  /// Multiplicity of each breakpoint, aligned with breakpoints().
  std::vector<int> multiplicities() const;
  int num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }
  double max_element_width() const;

  /// Knot span index i with t_i <= x < t_{i+1} (left limit at x = 1).
  int find_span(double x) const;

  /// Writes the values (row 0) and derivatives up to `max_deriv` (rows 1..)
  /// of the p+1 basis functions that may be nonzero at x into `out`, which
  /// must have at least (max_deriv+1) x (p+1) entries. Returns the index of
  /// the first of those functions.
  int evaluate(double x, int max_deriv, Eigen::Ref<Eigen::MatrixXd> out) const;

  /// Support [t_i, t_{i+p+1}] of basis function i.
  std::pair<double, double> support(int i) const;
  double greville(int i) const;

  bool operator==(const KnotVector&) const = default;

 private:
  int degree_;
  std::vector<double> knots_;
};

/// Uniform open knot vector with 2^r elements and C^s continuity at every
/// interior breakpoint.
KnotVector make_knot_vector(int degree, int refinement, int smoothness);

struct BasisValues {
  int first = 0;               ///< index of the first nonzero function
  std::vector<double> values;  ///< p+1 entries
};

/// Values (deriv_order = 0) or first derivatives (deriv_order = 1) of the
/// basis functions nonzero at x.
BasisValues eval_basis(const KnotVector& kv, double x, int deriv_order);

/// Tensor product of two univariate spaces; basis index = i + j * size_u()
/// (u runs fastest).
class TensorSplineSpace {
 public:
  TensorSplineSpace(KnotVector u, KnotVector v);

  const KnotVector& u() const { return u_; }
  const KnotVector& v() const { return v_; }
  const KnotVector& direction(int d) const { return d == 0 ? u_ : v_; }

  int size_u() const { return u_.size(); }
  int size_v() const { return v_.size(); }
  int size() const { return size_u() * size_v(); }
  int index(int i, int j) const { return i + j * size_u(); }
  std::pair<int, int> split(int index) const { return {index % size_u(), index / size_u()}; }

  int max_degree() const { return std::max(u_.degree(), v_.degree()); }
  /// Maximal parametric element width (h in the parameter domain).
  double max_element_width() const;

  bool operator==(const TensorSplineSpace&) const = default;

 private:
  KnotVector u_;
  KnotVector v_;
};

struct GeometryPoint {
  Eigen::Vector2d x;
  /// Column 0 = dx/du, column 1 = dx/dv.
  Eigen::Matrix2d jacobian;
};

/// Degree-2 NURBS map from the unit square onto a patch.
class GeometryMap {
 public:
  GeometryMap(TensorSplineSpace space, std::vector<Eigen::Vector2d> control_points,
              std::vector<double> weights);

  /// Axis-aligned rectangle [x0,x1] x [y0,y1], control points at the
  /// Greville abscissae.
  static GeometryMap rectangle(double x0, double y0, double x1, double y1);
  /// Annular sector r in [r_inner, r_outer], angle in [theta0, theta1]
  /// (radians, span at most 90 degrees). u runs along the arc, v radially,
  /// and |x(u,v)| = r_inner + v (r_outer - r_inner) exactly.
  static GeometryMap annular_sector(double r_inner, double r_outer, double theta0, double theta1);

  const TensorSplineSpace& space() const { return space_; }
  std::span<const Eigen::Vector2d> control_points() const { return control_; }
  std::span<const double> weights() const { return weights_; }

  GeometryPoint eval(double u, double v) const;
  Eigen::Vector2d point(double u, double v) const { return eval(u, v).x; }

  /// Max pairwise distance of sampled boundary points (H_k).
  double diameter() const;
  /// Axis-aligned bounding box of the control net (contains the patch).
  std::pair<Eigen::Vector2d, Eigen::Vector2d> bounding_box() const;

  /// Throws InvalidGeometryError unless det(jacobian) keeps one sign on a
  /// sampled grid of `per_direction` points per direction.
  void check_orientation(int per_direction = 16) const;

  /// Newton inversion of the map. Returns the parameter if a preimage in
  /// [0,1]^2 was found with residual below `tol`.
  std::optional<Eigen::Vector2d> invert(const Eigen::Vector2d& x, double tol) const;

 private:
  TensorSplineSpace space_;
  std::vector<Eigen::Vector2d> control_;
  std::vector<double> weights_;
};

}  // namespace ietidp
