#include "ietidp/oracle.hpp"

#include "ietidp/error.hpp"
#include "ietidp/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ietidp::oracle {

namespace {

struct PointBasis {
  int index;
  double val, du, dv;
};

std::vector<PointBasis> tensor_basis_at(const TensorSplineSpace& s, double u, double v) {
  const BasisValues bu = eval_basis(s.u(), u, 0), du = eval_basis(s.u(), u, 1);
  const BasisValues bv = eval_basis(s.v(), v, 0), dv = eval_basis(s.v(), v, 1);
  std::vector<PointBasis> out;
  for (std::size_t a = 0; a < bv.values.size(); ++a)
    for (std::size_t b = 0; b < bu.values.size(); ++b)
      out.push_back({s.index(bu.first + static_cast<int>(b), bv.first + static_cast<int>(a)),
                     bu.values[b] * bv.values[a], du.values[b] * bv.values[a], bu.values[b] * dv.values[a]});
  return out;
}

std::vector<double> merged_breaks(const MultiPatch& mp, const InterfaceView& view) {
  const GeometryMap& gk = mp.geometry(view.own.patch);
  const GeometryMap& gl = mp.geometry(view.neighbor.patch);
  std::vector<double> t{view.own.begin, view.own.end};
  for (double b : mp.space(view.own.patch).direction(along_direction(view.own.side)).breakpoints())
    if (b > view.own.begin && b < view.own.end) t.push_back(b);
  for (double b : mp.space(view.neighbor.patch).direction(along_direction(view.neighbor.side)).breakpoints()) {
    if (!(b > view.neighbor.begin && b < view.neighbor.end)) continue;
    const Eigen::Vector2d par = side_parameter(view.neighbor.side, b);
    t.push_back(project_to_edge(gk, view.own.side, gl.point(par.x(), par.y())).t);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return b - a <= 1e-12; }), t.end());
  return t;
}

}  // namespace

std::vector<Eigen::VectorXd> MonolithicSystem::to_patches(const Eigen::VectorXd& x) const {
  std::vector<Eigen::VectorXd> out;
  for (const auto& map : tensor_to_global) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(map.size());
    for (std::size_t t = 0; t < map.size(); ++t)
      if (map[t] >= 0) c(t) = x(map[t]);
    out.push_back(std::move(c));
  }
  return out;
}

Eigen::VectorXd MonolithicSystem::from_patches(std::span<const Eigen::VectorXd> coefficients) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
  for (std::size_t k = 0; k < tensor_to_global.size(); ++k)
    for (std::size_t t = 0; t < tensor_to_global[k].size(); ++t)
      if (tensor_to_global[k][t] >= 0) x(tensor_to_global[k][t]) = coefficients[k](t);
  return x;
}

MonolithicSystem assemble_monolithic(const MultiPatch& mp, const SourceFunction& f, double delta) {
  if (!(delta > 0.0)) throw ConfigError("penalty parameter delta must be positive");
  MonolithicSystem sys;
  int n = 0;
  for (int k = 0; k < mp.num_patches(); ++k) {
    const TensorSplineSpace& s = mp.space(k);
    std::vector<int> map(s.size(), -1);
    for (int t = 0; t < s.size(); ++t) {
      const auto [i, j] = s.split(t);
      const bool dir = (i == 0 && mp.is_dirichlet(k, Side::West)) ||
                       (i == s.size_u() - 1 && mp.is_dirichlet(k, Side::East)) ||
                       (j == 0 && mp.is_dirichlet(k, Side::South)) ||
                       (j == s.size_v() - 1 && mp.is_dirichlet(k, Side::North));
      if (!dir) map[t] = n++;
    }
    sys.tensor_to_global.push_back(std::move(map));
  }
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;

  for (int k = 0; k < mp.num_patches(); ++k) {
    const TensorSplineSpace& s = mp.space(k);
    const GeometryMap& g = mp.geometry(k);
    const auto& map = sys.tensor_to_global[k];
    const std::vector<double> bu = s.u().breakpoints(), bv = s.v().breakpoints();
    const QuadratureRule ru = quadrature_rule(s.u().degree() + 1), rv = quadrature_rule(s.v().degree() + 1);
    for (std::size_t ev = 0; ev + 1 < bv.size(); ++ev)
      for (std::size_t eu = 0; eu + 1 < bu.size(); ++eu) {
        const QuadratureRule qu = map_rule(ru, bu[eu], bu[eu + 1]);
        const QuadratureRule qv = map_rule(rv, bv[ev], bv[ev + 1]);
        for (std::size_t a = 0; a < qv.nodes.size(); ++a)
          for (std::size_t b = 0; b < qu.nodes.size(); ++b) {
            const GeometryPoint gp = g.eval(qu.nodes[b], qv.nodes[a]);
            const Eigen::Matrix2d jit = gp.jacobian.inverse().transpose();
            const double w = qu.weights[b] * qv.weights[a] * std::abs(gp.jacobian.determinant());
            const auto basis = tensor_basis_at(s, qu.nodes[b], qv.nodes[a]);
            std::vector<Eigen::Vector2d> grad;
            for (const auto& pb : basis) grad.push_back(jit * Eigen::Vector2d(pb.du, pb.dv));
            const double fx = f ? f(gp.x) : 0.0;
            for (std::size_t i = 0; i < basis.size(); ++i) {
              const int gi = map[basis[i].index];
              if (gi < 0) continue;
              sys.rhs(gi) += w * fx * basis[i].val;
              for (std::size_t j = 0; j < basis.size(); ++j) {
                const int gj = map[basis[j].index];
                if (gj >= 0) trip.emplace_back(gi, gj, w * grad[i].dot(grad[j]));
              }
            }
          }
      }

    for (const InterfaceView& view : mp.interfaces_of(k)) {
      const int l = view.neighbor.patch;
      const TensorSplineSpace& sl = mp.space(l);
      const auto& map_l = sys.tensor_to_global[l];
      const int p = std::max(s.max_degree(), sl.max_degree());
      const double sigma = delta * p * p / mp.interfaces()[view.interface].mesh_size;
      const std::vector<double> breaks = merged_breaks(mp, view);
      const QuadratureRule rule = quadrature_rule(p + 1);
      const Eigen::Vector2d nhat = parametric_outward_normal(view.own.side);
      const int along = along_direction(view.own.side);
      for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
        const QuadratureRule q = map_rule(rule, breaks[piece], breaks[piece + 1]);
        for (std::size_t iq = 0; iq < q.nodes.size(); ++iq) {
          const Eigen::Vector2d par = side_parameter(view.own.side, q.nodes[iq]);
          const GeometryPoint gp = g.eval(par.x(), par.y());
          const Eigen::Matrix2d jit = gp.jacobian.inverse().transpose();
          const Eigen::Vector2d normal = (jit * nhat).normalized();
          const double w = q.weights[iq] * gp.jacobian.col(along).norm();

          std::vector<std::pair<int, double>> own_val, own_dn, nb_val;
          for (const auto& pb : tensor_basis_at(s, par.x(), par.y())) {
            const int gi = map[pb.index];
            if (gi < 0) continue;
            own_val.emplace_back(gi, pb.val);
            own_dn.emplace_back(gi, (jit * Eigen::Vector2d(pb.du, pb.dv)).dot(normal));
          }
          const double tl = project_to_edge(mp.geometry(l), view.neighbor.side, gp.x).t;
          const Eigen::Vector2d pl = side_parameter(view.neighbor.side, tl);
          for (const auto& pb : tensor_basis_at(sl, pl.x(), pl.y()))
            if (map_l[pb.index] >= 0 && pb.val != 0.0) nb_val.emplace_back(map_l[pb.index], pb.val);

          // jump u' - u: +nb, -own
          std::vector<std::pair<int, double>> jump = nb_val;
          for (const auto& [gi, v] : own_val) jump.emplace_back(gi, -v);
          for (const auto& [gi, dn] : own_dn)
            for (const auto& [gj, jv] : jump) {
              trip.emplace_back(gi, gj, 0.5 * w * dn * jv);
              trip.emplace_back(gj, gi, 0.5 * w * dn * jv);
            }
          for (const auto& [gi, vi] : jump)
            for (const auto& [gj, vj] : jump) trip.emplace_back(gi, gj, sigma * w * vi * vj);
        }
      }
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

Eigen::VectorXd solve_direct(const MonolithicSystem& sys) {
  if (sys.size() == 0) return Eigen::VectorXd(0);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
  if (ldlt.info() != Eigen::Success) throw CoercivityError("monolithic matrix is singular (check delta and boundary conditions)");
  if ((ldlt.vectorD().array() <= 0.0).any())
    throw CoercivityError("monolithic matrix is not positive definite (delta too small?)");
  Eigen::VectorXd x = ldlt.solve(sys.rhs);
  const double scale = sys.rhs.norm();
  if (scale > 0.0 && (sys.matrix * x - sys.rhs).norm() > 1e-11 * scale) {
    std::ostringstream msg;
    msg << "monolithic direct solve residual " << (sys.matrix * x - sys.rhs).norm() / scale;
    throw CoercivityError(msg.str());
  }
  return x;
}

Eigen::MatrixXd materialize(const LinearOperator& op, int n) {
  Eigen::MatrixXd out(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    e(i) = 1.0;
    out.col(i) = op(e);
    e(i) = 0.0;
  }
  return out;
}

Spectrum dense_spectrum(const LinearOperator& apply_a, const LinearOperator& apply_b, int n) {
  Eigen::MatrixXd a = materialize(apply_a, n);
  Eigen::MatrixXd b = materialize(apply_b, n);
  for (const Eigen::MatrixXd* m : {&a, &b}) {
    const double scale = std::max(m->cwiseAbs().maxCoeff(), 1e-300);
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw OperatorError("dense_spectrum: operator is not symmetric");
  }
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  Spectrum out;
  if (n == 0) return out;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw OperatorError("dense_spectrum: first operator is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd m = l.transpose() * b * l;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  out.eigenvalues = es.eigenvalues();
  out.lambda_max = out.eigenvalues(n - 1);
  out.lambda_min = out.lambda_max;
  for (int i = 0; i < n; ++i)
    if (std::abs(out.eigenvalues(i)) > 1e-12 * std::abs(out.lambda_max)) {
      out.lambda_min = out.eigenvalues(i);
      break;
    }
  out.kappa = out.lambda_max / out.lambda_min;
  return out;
}

DenseIeti dense_ieti(std::span<const LocalSystem> systems, const SkeletonDofTable& table) {
  const int np = static_cast<int>(systems.size());
  DenseIeti o;
  int n = 0;
  for (const LocalSystem& s : systems) {
    o.offset.push_back(n);
    n += s.num_skeleton();
  }
  o.S = Eigen::MatrixXd::Zero(n, n);
  o.g = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < np; ++k) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(systems[k].matrix);
    const int ni = systems[k].num_interior(), ng = systems[k].num_skeleton();
    const Eigen::MatrixXd aii = a.topLeftCorner(ni, ni), aig = a.topRightCorner(ni, ng);
    Eigen::LLT<Eigen::MatrixXd> llt(aii);
    o.S.block(o.offset[k], o.offset[k], ng, ng) =
        a.bottomRightCorner(ng, ng) - aig.transpose() * llt.solve(aig);
    o.g.segment(o.offset[k], ng) =
        systems[k].rhs.tail(ng) - aig.transpose() * llt.solve(systems[k].rhs.head(ni));
  }

  int nl = 0;
  for (const DofClass& c : table.classes)
    if (!c.primal) nl += c.multiplicity() - 1;
  o.B = Eigen::MatrixXd::Zero(nl, n);
  o.D = Eigen::VectorXd::Zero(n);
  int row = 0;
  std::vector<std::pair<int, int>> primal;  // (global skeleton index, coarse)
  for (const DofClass& c : table.classes) {
    for (const SkeletonDof& m : c.members) {
      o.D(o.offset[m.patch] + m.local) = c.multiplicity();
      if (c.primal) primal.emplace_back(o.offset[m.patch] + m.local, c.coarse);
    }
    if (c.primal) continue;
    const SkeletonDof& own = c.members.front();
    for (std::size_t m = 1; m < c.members.size(); ++m, ++row) {
      o.B(row, o.offset[own.patch] + own.local) = 1.0;
      o.B(row, o.offset[c.members[m].patch] + c.members[m].local) = -1.0;
    }
  }
  std::sort(primal.begin(), primal.end());
  const int np_dofs = static_cast<int>(primal.size()), nc = table.num_coarse;
  o.C = Eigen::MatrixXd::Zero(np_dofs, n);
  o.R = Eigen::MatrixXd::Zero(np_dofs, nc);
  for (int i = 0; i < np_dofs; ++i) {
    o.C(i, primal[i].first) = 1.0;
    o.R(i, primal[i].second) = 1.0;
  }

  const int nk = n + np_dofs + nc;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nk, nk);
  kkt.topLeftCorner(n, n) = o.S;
  kkt.block(n, 0, np_dofs, n) = o.C;
  kkt.block(0, n, n, np_dofs) = o.C.transpose();
  kkt.block(n, n + np_dofs, np_dofs, nc) = -o.R;
  kkt.block(n + np_dofs, n, nc, np_dofs) = -o.R.transpose();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, nl + 1);
  rhs.topLeftCorner(n, nl) = o.B.transpose();
  rhs.block(0, nl, n, 1) = o.g;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) throw OperatorError("dense_ieti: saddle point system is singular");
  const Eigen::MatrixXd sol = lu.solve(rhs);
  o.F = o.B * sol.topLeftCorner(n, nl);
  o.d = o.B * sol.block(0, nl, n, 1);
  const Eigen::VectorXd dinv = o.D.cwiseInverse();
  o.MsD = o.B * dinv.asDiagonal() * o.S * dinv.asDiagonal() * o.B.transpose();
  return o;
}

double evaluate(const TensorSplineSpace& space, const Eigen::VectorXd& c, double u, double v) {
  double s = 0.0;
  for (const auto& pb : tensor_basis_at(space, u, v)) s += c(pb.index) * pb.val;
  return s;
}

double l2_error(const MultiPatch& mp, std::span<const Eigen::VectorXd> coefficients,
                const std::function<double(const Eigen::Vector2d&)>& exact) {
  double err = 0.0;
  for (int k = 0; k < mp.num_patches(); ++k) {
    const TensorSplineSpace& s = mp.space(k);
    const QuadratureRule rule = quadrature_rule(s.max_degree() + 3);
    const std::vector<double> bu = s.u().breakpoints(), bv = s.v().breakpoints();
    for (std::size_t ev = 0; ev + 1 < bv.size(); ++ev)
      for (std::size_t eu = 0; eu + 1 < bu.size(); ++eu) {
        const QuadratureRule qu = map_rule(rule, bu[eu], bu[eu + 1]);
        const QuadratureRule qv = map_rule(rule, bv[ev], bv[ev + 1]);
        for (std::size_t a = 0; a < qv.nodes.size(); ++a)
          for (std::size_t b = 0; b < qu.nodes.size(); ++b) {
            const GeometryPoint gp = mp.geometry(k).eval(qu.nodes[b], qv.nodes[a]);
            const double e = exact(gp.x) - evaluate(s, coefficients[k], qu.nodes[b], qv.nodes[a]);
            err += qu.weights[b] * qv.weights[a] * std::abs(gp.jacobian.determinant()) * e * e;
          }
      }
  }
  return std::sqrt(err);
}

}  // namespace ietidp::oracle
