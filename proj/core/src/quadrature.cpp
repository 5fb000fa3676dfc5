#include "ietidp/quadrature.hpp"

#include "ietidp/error.hpp"

#include <cmath>
#include <numbers>

namespace ietidp {

QuadratureRule quadrature_rule(int order) {
  if (order < 1) throw Error("quadrature_rule: order must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Newton iteration on P_n with the Chebyshev-like initial guess.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (order == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[order - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule map_rule(const QuadratureRule& rule, double a, double b) {
  QuadratureRule out = rule;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    out.nodes[i] = a + (b - a) * rule.nodes[i];
    out.weights[i] = (b - a) * rule.weights[i];
  }
  return out;
}

}  // namespace ietidp
