#include "ietidp/bspline.hpp"

#include "ietidp/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace ietidp {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 1 || degree_ > kMaxDegree) throw Error("KnotVector: degree must lie in [1, 15]");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (degree_ + 1)) throw Error("KnotVector: too few knots for degree");
  for (int i = 1; i < m; ++i)
    if (knots_[i] < knots_[i - 1]) throw Error("KnotVector: knots must be nondecreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != knots_.front() || knots_[m - 1 - i] != knots_.back())
      throw Error("KnotVector: knot vector must be open (end multiplicity p+1)");
  }
  if (knots_.front() != 0.0 || knots_.back() != 1.0)
    throw Error("KnotVector: knots must span [0,1]");
  for (int i = degree_ + 1; i < m - degree_ - 1; ++i) {
    int mult = 0;
    for (int j = i; j < m && knots_[j] == knots_[i]; ++j) ++mult;
    if (mult > degree_) throw Error("KnotVector: interior multiplicity exceeds degree");
  }
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> out;
  for (double t : knots_)
    if (out.empty() || t != out.back()) out.push_back(t);
  return out;
}

std::vector<int> KnotVector::multiplicities() const {
  std::vector<int> out;
  double last = -1.0;
  for (double t : knots_) {
    if (out.empty() || t != last) {
      out.push_back(1);
      last = t;
    } else {
      ++out.back();
    }
  }
  return out;
}

double KnotVector::max_element_width() const {
  const auto bp = breakpoints();
  double h = 0.0;
  for (std::size_t i = 1; i < bp.size(); ++i) h = std::max(h, bp[i] - bp[i - 1]);
  return h;
}

int KnotVector::find_span(double x) const {
  const int n = size();
  if (x < knots_.front() || x > knots_.back())
    throw DomainError("KnotVector: parameter " + std::to_string(x) + " outside [0,1]");
  if (x >= knots_[n]) return n - 1;
  // last i with t_i <= x
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n, x);
  return static_cast<int>(it - knots_.begin()) - 1;
}

int KnotVector::evaluate(double x, int max_deriv, Eigen::Ref<Eigen::MatrixXd> out) const {
  const int p = degree_;
  const int span = find_span(x);
  const int nd = std::min(max_deriv, p);

  // Piegl & Tiller, The NURBS Book, A2.3.
  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDegree + 1,
                              kMaxDegree + 1>;
  Small ndu(p + 1, p + 1);
  std::array<double, kMaxDegree + 1> left{}, right{};
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double tmp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out(0, j) = ndu(j, p);

  Eigen::Matrix<double, 2, Eigen::Dynamic, Eigen::ColMajor, 2, kMaxDegree + 1> a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) out(k, j) *= factor;
    factor *= (p - k);
  }
  for (int k = nd + 1; k <= max_deriv; ++k)
    for (int j = 0; j <= p; ++j) out(k, j) = 0.0;
  return span - p;
}

std::pair<double, double> KnotVector::support(int i) const {
  return {knots_[i], knots_[i + degree_ + 1]};
}

double KnotVector::greville(int i) const {
  double g = 0.0;
  for (int j = 1; j <= degree_; ++j) g += knots_[i + j];
  return g / degree_;
}

KnotVector make_knot_vector(int degree, int refinement, int smoothness) {
  if (degree < 1) throw Error("make_knot_vector: degree must be >= 1");
  if (refinement < 0) throw Error("make_knot_vector: refinement level must be >= 0");
  if (smoothness < 0 || smoothness >= degree)
    throw InvalidSmoothnessError("make_knot_vector: smoothness " + std::to_string(smoothness) +
                                 " not in [0, " + std::to_string(degree - 1) + "]");
  const int elements = 1 << refinement;
  std::vector<double> knots(degree + 1, 0.0);
  for (int e = 1; e < elements; ++e)
    knots.insert(knots.end(), degree - smoothness, static_cast<double>(e) / elements);
  knots.insert(knots.end(), degree + 1, 1.0);
  return KnotVector(degree, std::move(knots));
}

BasisValues eval_basis(const KnotVector& kv, double x, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 1) throw Error("eval_basis: deriv_order must be 0 or 1");
  Eigen::MatrixXd buf(deriv_order + 1, kv.degree() + 1);
  BasisValues out;
  out.first = kv.evaluate(x, deriv_order, buf);
  out.values.resize(kv.degree() + 1);
  for (int j = 0; j <= kv.degree(); ++j) out.values[j] = buf(deriv_order, j);
  return out;
}

TensorSplineSpace::TensorSplineSpace(KnotVector u, KnotVector v)
    : u_(std::move(u)), v_(std::move(v)) {}

double TensorSplineSpace::max_element_width() const {
  return std::max(u_.max_element_width(), v_.max_element_width());
}

// ---------------------------------------------------------------------------

GeometryMap::GeometryMap(TensorSplineSpace space, std::vector<Eigen::Vector2d> control_points,
                         std::vector<double> weights)
    : space_(std::move(space)), control_(std::move(control_points)), weights_(std::move(weights)) {
  if (space_.u().degree() != 2 || space_.v().degree() != 2)
    throw InvalidGeometryError("GeometryMap: geometry must be a degree-2 NURBS");
  if (static_cast<int>(control_.size()) != space_.size() ||
      static_cast<int>(weights_.size()) != space_.size())
    throw InvalidGeometryError("GeometryMap: control net size does not match the spline space");
}

GeometryMap GeometryMap::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) throw InvalidGeometryError("rectangle: empty extent");
  const KnotVector kv(2, {0, 0, 0, 1, 1, 1});
  TensorSplineSpace space(kv, kv);
  std::vector<Eigen::Vector2d> cp;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      cp.emplace_back(x0 + kv.greville(i) * (x1 - x0), y0 + kv.greville(j) * (y1 - y0));
  return GeometryMap(space, std::move(cp), std::vector<double>(9, 1.0));
}

GeometryMap GeometryMap::annular_sector(double r_inner, double r_outer, double theta0,
                                        double theta1) {
  const double span = theta1 - theta0;
  if (!(r_inner > 0.0) || !(r_outer > r_inner))
    throw InvalidGeometryError("annular_sector: need 0 < r_inner < r_outer");
  if (!(span > 0.0) || span > std::numbers::pi / 2 + 1e-12)
    throw InvalidGeometryError("annular_sector: angular span must lie in (0, 90 deg]");
  const KnotVector kv(2, {0, 0, 0, 1, 1, 1});
  TensorSplineSpace space(kv, kv);
  const double half = 0.5 * span;
  const double mid = theta0 + half;
  const std::array<Eigen::Vector2d, 3> arc{
      Eigen::Vector2d(std::cos(theta0), std::sin(theta0)),
      Eigen::Vector2d(std::cos(mid), std::sin(mid)) / std::cos(half),
      Eigen::Vector2d(std::cos(theta1), std::sin(theta1))};
  const std::array<double, 3> arc_w{1.0, std::cos(half), 1.0};
  const std::array<double, 3> radius{r_inner, 0.5 * (r_inner + r_outer), r_outer};
  std::vector<Eigen::Vector2d> cp;
  std::vector<double> w;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      cp.push_back(radius[j] * arc[i]);
      w.push_back(arc_w[i]);
    }
  return GeometryMap(space, std::move(cp), std::move(w));
}

GeometryPoint GeometryMap::eval(double u, double v) const {
  const KnotVector& ku = space_.u();
  const KnotVector& kvv = space_.v();
  Eigen::Matrix<double, 2, 3> bu, bv;
  const int fu = ku.evaluate(u, 1, bu);
  const int fv = kvv.evaluate(v, 1, bv);

  double w = 0.0, wu = 0.0, wv = 0.0;
  Eigen::Vector2d a = Eigen::Vector2d::Zero(), au = a, av = a;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const int idx = space_.index(fu + i, fv + j);
      const double wi = weights_[idx];
      const double n = bu(0, i) * bv(0, j) * wi;
      const double nu = bu(1, i) * bv(0, j) * wi;
      const double nv = bu(0, i) * bv(1, j) * wi;
      w += n;
      wu += nu;
      wv += nv;
      a += n * control_[idx];
      au += nu * control_[idx];
      av += nv * control_[idx];
    }
  }
  if (std::abs(w) < 1e-14) throw InvalidGeometryError("GeometryMap: zero rational denominator");
  GeometryPoint gp;
  gp.x = a / w;
  gp.jacobian.col(0) = (au - gp.x * wu) / w;
  gp.jacobian.col(1) = (av - gp.x * wv) / w;
  return gp;
}

double GeometryMap::diameter() const {
  constexpr int n = 16;
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    pts.push_back(point(t, 0.0));
    pts.push_back(point(t, 1.0));
    pts.push_back(point(0.0, t));
    pts.push_back(point(1.0, t));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> GeometryMap::bounding_box() const {
  Eigen::Vector2d lo = control_.front(), hi = control_.front();
  for (const auto& c : control_) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  return {lo, hi};
}

void GeometryMap::check_orientation(int per_direction) const {
  int sign = 0;
  for (int j = 0; j < per_direction; ++j)
    for (int i = 0; i < per_direction; ++i) {
      const double u = (i + 0.5) / per_direction, v = (j + 0.5) / per_direction;
      const double det = eval(u, v).jacobian.determinant();
      const int s = det > 0 ? 1 : (det < 0 ? -1 : 0);
      if (s == 0 || (sign != 0 && s != sign))
        throw InvalidGeometryError("GeometryMap: Jacobian determinant changes sign");
      sign = s;
    }
}

std::optional<Eigen::Vector2d> GeometryMap::invert(const Eigen::Vector2d& x, double tol) const {
  for (double su : {0.5, 0.15, 0.85})
    for (double sv : {0.5, 0.15, 0.85}) {
      Eigen::Vector2d par(su, sv);
      for (int it = 0; it < 60; ++it) {
        const GeometryPoint gp = eval(par.x(), par.y());
        const Eigen::Vector2d res = gp.x - x;
        if (res.norm() < tol) return par;
        const double det = gp.jacobian.determinant();
        if (std::abs(det) < 1e-300) break;
        Eigen::Vector2d step = gp.jacobian.inverse() * res;
        par = (par - step).cwiseMax(0.0).cwiseMin(1.0);
      }
      if ((point(par.x(), par.y()) - x).norm() < tol) return par;
    }
  return std::nullopt;
}

}  // namespace ietidp
