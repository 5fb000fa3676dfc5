#pragma once

// Test-only reference implementations, deliberately naive.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

namespace ref {

/// Recursive Cox-de Boor definition; right-continuous, left limit at the
/// last knot.
inline double bspline(const std::vector<double>& t, int p, int i, double x) {
  if (p == 0) {
    const double a = t[i], b = t[i + 1];
    if (a == b) return 0.0;
    if (x >= a && x < b) return 1.0;
    return (x == t.back() && b == t.back() && a < b) ? 1.0 : 0.0;
  }
  double v = 0.0;
  if (t[i + p] > t[i]) v += (x - t[i]) / (t[i + p] - t[i]) * bspline(t, p - 1, i, x);
  if (t[i + p + 1] > t[i + 1]) v += (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * bspline(t, p - 1, i + 1, x);
  return v;
}

/// Derivative from the degree-lowering identity.
inline double bspline_derivative(const std::vector<double>& t, int p, int i, double x) {
  double v = 0.0;
  if (t[i + p] > t[i]) v += p / (t[i + p] - t[i]) * bspline(t, p - 1, i, x);
  if (t[i + p + 1] > t[i + 1]) v -= p / (t[i + p + 1] - t[i + 1]) * bspline(t, p - 1, i + 1, x);
  return v;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Composite midpoint-free Gauss rule built from scratch: n subintervals of
/// [a, b], 5-point Gauss-Legendre with hard-coded nodes.
inline double composite_gauss(const std::function<double(double)>& f, double a, double b, int n) {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  double s = 0.0;
  const double h = (b - a) / n;
  for (int e = 0; e < n; ++e) {
    const double c = a + (e + 0.5) * h;
    for (int q = 0; q < 5; ++q) s += 0.5 * h * w[q] * f(c + 0.5 * h * x[q]);
  }
  return s;
}

/// Composite Gauss rule with subintervals of width 1/n_sub on [0,1]; exact
/// for piecewise polynomials of degree <= 9 whose breakpoints lie on the grid.
inline double integrate01(const std::function<double(double)>& f, int n_sub) {
  return composite_gauss(f, 0.0, 1.0, n_sub);
}

/// 1D mass (d = 0) or stiffness (d = 1) matrix of the B-spline basis on the
/// knot vector t, by brute-force quadrature.
inline Eigen::MatrixXd gram_1d(const std::vector<double>& t, int p, int d, int n_sub) {
  const int n = static_cast<int>(t.size()) - p - 1;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      m(i, j) = m(j, i) = integrate01(
          [&](double x) {
            return d == 0 ? bspline(t, p, i, x) * bspline(t, p, j, x)
                          : bspline_derivative(t, p, i, x) * bspline_derivative(t, p, j, x);
          },
          n_sub);
    }
  return m;
}

}  // namespace ref
