#include "ietidp/assembly.hpp"

#include "ietidp/error.hpp"
#include "ietidp/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ietidp {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// Basis values/derivatives at the Gauss points of every element of one
/// parameter direction.
struct DirectionTable {
  int degree = 0;
  int nq = 0;
  std::vector<double> breaks;
  std::vector<int> first;                     // per element
  std::vector<double> node, weight;           // [e*nq + q]
  std::vector<double> val, der;               // [(e*nq + q)*(p+1) + a]

  DirectionTable(const KnotVector& kv, const QuadratureRule& rule)
      : degree(kv.degree()), nq(static_cast<int>(rule.nodes.size())), breaks(kv.breakpoints()) {
    const int ne = static_cast<int>(breaks.size()) - 1;
    const int nb = degree + 1;
    Eigen::MatrixXd buf(2, nb);
    first.resize(ne);
    node.resize(ne * nq);
    weight.resize(ne * nq);
    val.resize(ne * nq * nb);
    der.resize(ne * nq * nb);
    for (int e = 0; e < ne; ++e) {
      const QuadratureRule q = map_rule(rule, breaks[e], breaks[e + 1]);
      for (int i = 0; i < nq; ++i) {
        const int f = kv.evaluate(q.nodes[i], 1, buf);
        first[e] = f;
        node[e * nq + i] = q.nodes[i];
        weight[e * nq + i] = q.weights[i];
        for (int a = 0; a < nb; ++a) {
          val[(e * nq + i) * nb + a] = buf(0, a);
          der[(e * nq + i) * nb + a] = buf(1, a);
        }
      }
    }
  }
  int num_elements() const { return static_cast<int>(first.size()); }
};

/// Owner tensor indices of the neighbor trace functions that live on the
/// artificial interface described by `view`, and the map along-index ->
/// position (-1 if not used).
std::pair<std::vector<int>, std::vector<int>> neighbor_trace_functions(const MultiPatch& mp,
                                                                       const InterfaceView& view) {
  const int l = view.neighbor.patch;
  const TensorSplineSpace& sl = mp.space(l);
  const KnotVector& kv = sl.direction(along_direction(view.neighbor.side));
  std::vector<int> basis;
  std::vector<int> position(kv.size(), -1);
  for (int a = 0; a < kv.size(); ++a) {
    const auto [s0, s1] = kv.support(a);
    const double overlap = std::min(s1, view.neighbor.end) - std::max(s0, view.neighbor.begin);
    if (overlap <= 1e-12) continue;
    const int tensor = trace_to_tensor(sl, view.neighbor.side, a);
    if (is_dirichlet_function(mp, l, tensor)) continue;
    position[a] = static_cast<int>(basis.size());
    basis.push_back(tensor);
  }
  return {basis, position};
}

}  // namespace

double penalty_weight(double delta, int degree, double mesh_size) {
  if (!(delta > 0.0)) throw ConfigError("penalty parameter delta must be positive");
  if (!(mesh_size > 0.0)) throw InternalError("interface mesh size not set (spaces attached?)");
  return delta * degree * degree / mesh_size;
}

bool is_dirichlet_function(const MultiPatch& mp, int k, int tensor_index) {
  const TensorSplineSpace& s = mp.space(k);
  const auto [i, j] = s.split(tensor_index);
  return (i == 0 && mp.is_dirichlet(k, Side::West)) ||
         (i == s.size_u() - 1 && mp.is_dirichlet(k, Side::East)) ||
         (j == 0 && mp.is_dirichlet(k, Side::South)) ||
         (j == s.size_v() - 1 && mp.is_dirichlet(k, Side::North));
}

int trace_to_tensor(const TensorSplineSpace& space, Side side, int along_index) {
  switch (side) {
    case Side::West: return space.index(0, along_index);
    case Side::East: return space.index(space.size_u() - 1, along_index);
    case Side::South: return space.index(along_index, 0);
    case Side::North: return space.index(along_index, space.size_v() - 1);
  }
  return -1;
}

ExtendedSpaceIndex build_extended_index(const MultiPatch& mp, int k) {
  const TensorSplineSpace& s = mp.space(k);
  ExtendedSpaceIndex idx;
  idx.patch = k;
  idx.tensor_to_extended.assign(s.size(), -1);
  // a function vanishes on the whole patch boundary iff it is not the first
  // or last one in either direction (open knot vectors)
  std::vector<int> boundary;
  for (int t = 0; t < s.size(); ++t) {
    if (is_dirichlet_function(mp, k, t)) continue;
    const auto [i, j] = s.split(t);
    const bool interior = i > 0 && i < s.size_u() - 1 && j > 0 && j < s.size_v() - 1;
    if (interior)
      idx.own_basis.push_back(t);
    else
      boundary.push_back(t);
  }
  idx.num_interior = static_cast<int>(idx.own_basis.size());
  idx.own_basis.insert(idx.own_basis.end(), boundary.begin(), boundary.end());
  for (int e = 0; e < idx.num_own(); ++e) idx.tensor_to_extended[idx.own_basis[e]] = e;

  for (const InterfaceView& view : mp.interfaces_of(k)) {
    const auto [basis, position] = neighbor_trace_functions(mp, view);
    for (int b : basis) idx.artificial.push_back({view.interface, view.neighbor.patch, b});
  }
  return idx;
}

Eigen::SparseMatrix<double> LocalSystem::block_II() const {
  return matrix.block(0, 0, num_interior(), num_interior());
}
Eigen::SparseMatrix<double> LocalSystem::block_IG() const {
  return matrix.block(0, num_interior(), num_interior(), num_skeleton());
}
Eigen::SparseMatrix<double> LocalSystem::block_GG() const {
  return matrix.block(num_interior(), num_interior(), num_skeleton(), num_skeleton());
}

VolumeContribution assemble_volume(const GeometryMap& geo, const TensorSplineSpace& space,
                                   const SourceFunction& f, int patch_id) {
  const KnotVector& ku = space.u();
  const KnotVector& kv = space.v();
  const DirectionTable tu(ku, quadrature_rule(ku.degree() + 1));
  const DirectionTable tv(kv, quadrature_rule(kv.degree() + 1));
  const int pu = ku.degree() + 1, pv = kv.degree() + 1;
  const int nb = pu * pv;
  const int nq = tu.nq * tv.nq;

  // functions a, b of one direction couple iff they share an element; the
  // partners of a form the contiguous range [lo[a], hi[a]]
  auto coupling = [](const DirectionTable& t, int n) {
    std::vector<int> lo(n, n), hi(n, -1);
    for (int e = 0; e < t.num_elements(); ++e)
      for (int a = t.first[e]; a <= t.first[e] + t.degree; ++a) {
        lo[a] = std::min(lo[a], t.first[e]);
        hi[a] = std::max(hi[a], t.first[e] + t.degree);
      }
    return std::pair{lo, hi};
  };
  const auto [lo_u, hi_u] = coupling(tu, space.size_u());
  const auto [lo_v, hi_v] = coupling(tv, space.size_v());
  Eigen::SparseMatrix<double> stiff(space.size(), space.size());
  {
    std::vector<int> outer(space.size() + 1, 0);
    for (int j = 0; j < space.size(); ++j) {
      const auto [ju, jv] = space.split(j);
      outer[j + 1] = outer[j] + (hi_u[ju] - lo_u[ju] + 1) * (hi_v[jv] - lo_v[jv] + 1);
    }
    stiff.resizeNonZeros(outer.back());
    std::copy(outer.begin(), outer.end(), stiff.outerIndexPtr());
    for (int j = 0; j < space.size(); ++j) {
      const auto [ju, jv] = space.split(j);
      int pos = outer[j];
      for (int iv = lo_v[jv]; iv <= hi_v[jv]; ++iv)
        for (int iu = lo_u[ju]; iu <= hi_u[ju]; ++iu) stiff.innerIndexPtr()[pos++] = space.index(iu, iv);
    }
    std::fill(stiff.valuePtr(), stiff.valuePtr() + outer.back(), 0.0);
  }
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.size());
  Eigen::MatrixXd grads(2 * nq, nb);
  Eigen::MatrixXd ke(nb, nb);
  Eigen::VectorXd fe(nb);
  std::vector<int> dofs(nb);

  for (int ev = 0; ev < tv.num_elements(); ++ev)
    for (int eu = 0; eu < tu.num_elements(); ++eu) {
      fe.setZero();
      for (int a = 0; a < pv; ++a)
        for (int b = 0; b < pu; ++b) dofs[b + pu * a] = space.index(tu.first[eu] + b, tv.first[ev] + a);

      for (int qv = 0; qv < tv.nq; ++qv)
        for (int qu = 0; qu < tu.nq; ++qu) {
          const int iu = eu * tu.nq + qu, iv = ev * tv.nq + qv;
          const GeometryPoint gp = geo.eval(tu.node[iu], tv.node[iv]);
          const double det = gp.jacobian.determinant();
          if (std::abs(det) < 1e-14) {
            std::ostringstream msg;
            msg << "degenerate geometry on patch " << patch_id << ", element (" << eu << ", " << ev
                << "): |det DG| = " << std::abs(det);
            throw DegenerateGeometryError(msg.str());
          }
          const Eigen::Matrix2d jit = gp.jacobian.inverse().transpose();
          const double w = tu.weight[iu] * tv.weight[iv] * std::abs(det);
          const double sw = std::sqrt(w);
          const double fx = f ? f(gp.x) : 0.0;
          const int row = 2 * (qu + tu.nq * qv);
          for (int a = 0; a < pv; ++a) {
            const double nv = tv.val[iv * pv + a], dv = tv.der[iv * pv + a];
            for (int b = 0; b < pu; ++b) {
              const double nu = tu.val[iu * pu + b], du = tu.der[iu * pu + b];
              const Eigen::Vector2d g = jit * Eigen::Vector2d(du * nv, nu * dv);
              grads(row, b + pu * a) = sw * g.x();
              grads(row + 1, b + pu * a) = sw * g.y();
              fe(b + pu * a) += w * fx * nu * nv;
            }
          }
        }
      ke.setZero();
      ke.selfadjointView<Eigen::Lower>().rankUpdate(grads.transpose());
      // slot of (i, j) in column j: base_j + iv * width_u(ju) + iu
      for (int j = 0; j < nb; ++j) {
        const int ju = tu.first[eu] + j % pu, jv = tv.first[ev] + j / pu;
        const int wu = hi_u[ju] - lo_u[ju] + 1;
        double* col = stiff.valuePtr() + stiff.outerIndexPtr()[dofs[j]] - lo_v[jv] * wu - lo_u[ju];
        for (int i = 0; i < nb; ++i) {
          const int iu = tu.first[eu] + i % pu, iv = tv.first[ev] + i / pu;
          col[iv * wu + iu] += i >= j ? ke(i, j) : ke(j, i);
        }
      }
      for (int i = 0; i < nb; ++i) load(dofs[i]) += fe(i);
    }

  VolumeContribution out;
  out.stiffness = std::move(stiff);
  out.load = std::move(load);
  return out;
}

std::vector<double> interface_breakpoints(const MultiPatch& mp, const InterfaceView& view) {
  const int k = view.own.patch;
  const GeometryMap& gk = mp.geometry(k);
  const GeometryMap& gl = mp.geometry(view.neighbor.patch);
  std::vector<double> pts{view.own.begin, view.own.end};
  for (double b : mp.space(k).direction(along_direction(view.own.side)).breakpoints())
    if (b > view.own.begin && b < view.own.end) pts.push_back(b);
  const double len_own = view.own.end - view.own.begin;
  const double len_nb = view.neighbor.end - view.neighbor.begin;
  for (double b : mp.space(view.neighbor.patch).direction(along_direction(view.neighbor.side)).breakpoints()) {
    if (!(b > view.neighbor.begin && b < view.neighbor.end)) continue;
    const double s = (b - view.neighbor.begin) / len_nb;
    const double guess = view.reversed ? view.own.end - s * len_own : view.own.begin + s * len_own;
    const Eigen::Vector2d par = side_parameter(view.neighbor.side, b);
    pts.push_back(project_to_edge(gk, view.own.side, gl.point(par.x(), par.y()), guess).t);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double t : pts)
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  return out;
}

InterfaceContribution assemble_interface(const MultiPatch& mp, int k, const InterfaceView& view,
                                         const AssemblyOptions& options) {
  const int l = view.neighbor.patch;
  const GeometryMap& gk = mp.geometry(k);
  const GeometryMap& gl = mp.geometry(l);
  const TensorSplineSpace& sk = mp.space(k);
  const TensorSplineSpace& sl = mp.space(l);
  const KnotVector& nb_kv = sl.direction(along_direction(view.neighbor.side));

  InterfaceContribution out;
  std::vector<int> position;
  std::tie(out.neighbor_basis, position) = neighbor_trace_functions(mp, view);

  const int degree = std::max(sk.max_degree(), sl.max_degree());
  const double sigma = penalty_weight(options.delta, degree, view.mesh_size);
  const std::vector<double> breaks = interface_breakpoints(mp, view);
  if (breaks.size() < 2) throw InternalError("assemble_interface: empty breakpoint list");

  const QuadratureRule rule = quadrature_rule(degree + 1);
  const int n_own = sk.size();
  const int n_total = n_own + static_cast<int>(out.neighbor_basis.size());
  const Eigen::Vector2d nhat = parametric_outward_normal(view.own.side);
  const int along = along_direction(view.own.side);
  const double match_tol = std::max(1e3 * mp.tolerance(), 1e-9 * mp.diameter());

  struct OwnEntry {
    int dof;
    double val, dn;
  };
  struct NbEntry {
    int dof;
    double val;
  };
  std::vector<OwnEntry> own;
  std::vector<NbEntry> nb;
  Eigen::MatrixXd bu(2, sk.u().degree() + 1), bv(2, sk.v().degree() + 1), bn(1, nb_kv.degree() + 1);
  Triplets cons, pen;

  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const QuadratureRule q = map_rule(rule, breaks[piece], breaks[piece + 1]);
    for (std::size_t iq = 0; iq < q.nodes.size(); ++iq) {
      const double t = q.nodes[iq];
      const Eigen::Vector2d par = side_parameter(view.own.side, t);
      const GeometryPoint gp = gk.eval(par.x(), par.y());
      const Eigen::Matrix2d jit = gp.jacobian.inverse().transpose();
      const Eigen::Vector2d normal = (jit * nhat).normalized();
      const double w = q.weights[iq] * gp.jacobian.col(along).norm();

      own.clear();
      const int fu = sk.u().evaluate(par.x(), 1, bu);
      const int fv = sk.v().evaluate(par.y(), 1, bv);
      for (int a = 0; a < bv.cols(); ++a)
        for (int b = 0; b < bu.cols(); ++b) {
          const double val = bu(0, b) * bv(0, a);
          const double dn = (jit * Eigen::Vector2d(bu(1, b) * bv(0, a), bu(0, b) * bv(1, a))).dot(normal);
          if (val == 0.0 && dn == 0.0) continue;
          own.push_back({sk.index(fu + b, fv + a), val, dn});
        }

      const EdgeProjection pr = project_to_edge(gl, view.neighbor.side, gp.x, view.neighbor_guess(t));
      if (pr.distance > match_tol) throw InternalError("assemble_interface: neighbor trace lookup failed");
      nb.clear();
      const int fn = nb_kv.evaluate(pr.t, 0, bn);
      for (int a = 0; a < bn.cols(); ++a) {
        const int pos = position[fn + a];
        if (pos >= 0 && bn(0, a) != 0.0) nb.push_back({n_own + pos, bn(0, a)});
      }

      // m: 1/2 dn(u) (v' - v) + 1/2 dn(v) (u' - u);  r: sigma (u' - u)(v' - v)
      for (const OwnEntry& i : own) {
        for (const OwnEntry& j : own) {
          cons.emplace_back(i.dof, j.dof, -0.5 * w * (j.dn * i.val + i.dn * j.val));
          pen.emplace_back(i.dof, j.dof, sigma * w * i.val * j.val);
        }
        for (const NbEntry& j : nb) {
          cons.emplace_back(i.dof, j.dof, 0.5 * w * i.dn * j.val);
          cons.emplace_back(j.dof, i.dof, 0.5 * w * i.dn * j.val);
          pen.emplace_back(i.dof, j.dof, -sigma * w * i.val * j.val);
          pen.emplace_back(j.dof, i.dof, -sigma * w * i.val * j.val);
        }
      }
      for (const NbEntry& i : nb)
        for (const NbEntry& j : nb) pen.emplace_back(i.dof, j.dof, sigma * w * i.val * j.val);
    }
  }
  out.consistency.resize(n_total, n_total);
  out.consistency.setFromTriplets(cons.begin(), cons.end());
  out.penalty.resize(n_total, n_total);
  out.penalty.setFromTriplets(pen.begin(), pen.end());
  return out;
}

LocalSystem assemble_local(const MultiPatch& mp, int k, const SourceFunction& f,
                           const AssemblyOptions& options) {
  LocalSystem sys;
  sys.index = build_extended_index(mp, k);
  const ExtendedSpaceIndex& idx = sys.index;
  const int n = idx.size();

  Triplets trip;
  const VolumeContribution vol = assemble_volume(mp.geometry(k), mp.space(k), f, k);
  sys.rhs = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < idx.num_own(); ++e) sys.rhs(e) = vol.load(idx.own_basis[e]);
  for (int c = 0; c < vol.stiffness.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(vol.stiffness, c); it; ++it) {
      const int i = idx.tensor_to_extended[it.row()], j = idx.tensor_to_extended[it.col()];
      if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
    }

  const int n_own_tensor = mp.space(k).size();
  int offset = idx.num_own();
  for (const InterfaceView& view : mp.interfaces_of(k)) {
    const InterfaceContribution ic = assemble_interface(mp, k, view, options);
    auto map = [&](int local) {
      return local < n_own_tensor ? idx.tensor_to_extended[local] : offset + (local - n_own_tensor);
    };
    for (const auto* m : {&ic.consistency, &ic.penalty})
      for (int c = 0; c < m->outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(*m, c); it; ++it) {
          const int i = map(it.row()), j = map(it.col());
          if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
        }
    offset += static_cast<int>(ic.neighbor_basis.size());
  }
  if (offset != n) throw InternalError("assemble_local: artificial DOF bookkeeping mismatch");

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

void write_triplets(const LocalSystem& sys, std::ostream& out) {
  out << sys.matrix.rows() << ' ' << sys.matrix.cols() << ' ' << sys.matrix.nonZeros() << '\n';
  out.precision(17);
  for (int c = 0; c < sys.matrix.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, c); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  for (int i = 0; i < sys.rhs.size(); ++i) out << "rhs " << i << ' ' << sys.rhs(i) << '\n';
}

}  // namespace ietidp
