#include "ietidp/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ietidp;

TEST(Quadrature, OrderOneIsMidpoint) {
  const QuadratureRule q = quadrature_rule(1);
  ASSERT_EQ(q.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(q.nodes[0], 0.5);
  EXPECT_DOUBLE_EQ(q.weights[0], 1.0);
}

TEST(Quadrature, ExactForPolynomials) {
  const QuadratureRule q3 = quadrature_rule(3);
  double s = 0.0;
  for (std::size_t i = 0; i < q3.nodes.size(); ++i) s += q3.weights[i] * std::pow(q3.nodes[i], 5);
  EXPECT_NEAR(s, 1.0 / 6.0, 1e-15);

  for (int n = 1; n <= 12; ++n) {
    const QuadratureRule q = quadrature_rule(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double v = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) v += q.weights[i] * std::pow(q.nodes[i], d);
      EXPECT_NEAR(v, 1.0 / (d + 1), 1e-14) << "order " << n << " degree " << d;
    }
  }
}

// A single Gauss interval needs order 7 for 1e-12 on sin(pi x); with the
// rule mapped to the elements of a 4-element mesh, order p+1 suffices from p = 4.
TEST(Quadrature, SineIntegral) {
  const double exact = 2.0 / std::numbers::pi;
  for (int p = 4; p <= 7; ++p) {
    const QuadratureRule rule = quadrature_rule(p + 1);
    double s = 0.0;
    for (int e = 0; e < 4; ++e) {
      const QuadratureRule q = map_rule(rule, e / 4.0, (e + 1) / 4.0);
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::sin(std::numbers::pi * q.nodes[i]);
    }
    EXPECT_NEAR(s, exact, 1e-12) << "p = " << p;
  }
  const QuadratureRule q7 = quadrature_rule(7);
  double s = 0.0;
  for (std::size_t i = 0; i < q7.nodes.size(); ++i) s += q7.weights[i] * std::sin(std::numbers::pi * q7.nodes[i]);
  EXPECT_NEAR(s, exact, 1e-12);
}
