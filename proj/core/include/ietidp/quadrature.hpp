#pragma once

#include <vector>

namespace ietidp {

/// Gauss-Legendre rule on [0,1]; exact for polynomials of degree 2*order-1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule quadrature_rule(int order);

/// Maps the rule onto [a,b] (weights scaled by b-a).
QuadratureRule map_rule(const QuadratureRule& rule, double a, double b);

}  // namespace ietidp
