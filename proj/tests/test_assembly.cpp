#include "ietidp/assembly.hpp"
#include "ietidp/error.hpp"

#include "reference.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ietidp;

namespace {

std::vector<double> knots_of(const KnotVector& kv) { return {kv.knots().begin(), kv.knots().end()}; }

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& a) { return Eigen::MatrixXd(a); }

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

MultiPatch unit_square(int p, int r, int s) { return MultiPatch({GeometryMap::rectangle(0, 0, 1, 1)}).discretize(p, r, s); }

MultiPatch two_squares() { return MultiPatch({GeometryMap::rectangle(0, 0, 1, 1), GeometryMap::rectangle(1, 0, 2, 1)}); }

const SourceFunction kOne = [](const Eigen::Vector2d&) { return 1.0; };

}  // namespace

TEST(Volume, RowSumsVanish) {
  const MultiPatch mp = unit_square(1, 1, 0);
  const VolumeContribution v = assemble_volume(mp.geometry(0), mp.space(0), kOne);
  const Eigen::VectorXd sums = dense(v.stiffness).rowwise().sum();
  EXPECT_LT(sums.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(v.load.sum(), 1.0, 1e-14);
}

TEST(Volume, LinearFunctionEnergy) {
  for (int p = 1; p <= 5; ++p) {
    const MultiPatch mp = unit_square(p, 2, p - 1);
    const TensorSplineSpace& sp = mp.space(0);
    const VolumeContribution v = assemble_volume(mp.geometry(0), sp, kOne);
    Eigen::VectorXd c(sp.size());
    for (int i = 0; i < sp.size(); ++i) c(i) = sp.u().greville(sp.split(i).first);  // u = x
    EXPECT_NEAR(c.dot(v.stiffness * c), 1.0, 1e-13) << "p = " << p;
  }
}

TEST(Volume, LogEnergyOnQuarterAnnulus) {
  // |x(u,v)| = 1 + v, so the interpolant of log|x| is a univariate
  // interpolant of log(1+v); Dirichlet energy of log|x| is (pi/2) log 2
  const MultiPatch mp =
      MultiPatch({GeometryMap::annular_sector(1.0, 2.0, 0.0, std::numbers::pi / 2)}).discretize(3, 5, 2);
  const TensorSplineSpace& sp = mp.space(0);
  const std::vector<double> t = knots_of(sp.v());
  const int n = sp.size_v();
  Eigen::MatrixXd colloc(n, n);
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    const double x = sp.v().greville(i);
    g(i) = std::log1p(x);
    for (int j = 0; j < n; ++j) colloc(i, j) = ref::bspline(t, 3, j, x);
  }
  const Eigen::VectorXd a = colloc.fullPivLu().solve(g);
  Eigen::VectorXd c(sp.size());
  for (int i = 0; i < sp.size(); ++i) c(i) = a(sp.split(i).second);

  const VolumeContribution v = assemble_volume(mp.geometry(0), sp, kOne);
  const double exact = std::numbers::pi / 2 * std::log(2.0);
  EXPECT_NEAR(c.dot(v.stiffness * c) / exact, 1.0, 1e-4);
}

TEST(Volume, DegenerateGeometry) {
  const GeometryMap r = GeometryMap::rectangle(0, 0, 1, 1);
  std::vector<Eigen::Vector2d> cps(r.control_points().begin(), r.control_points().end());
  for (auto& c : cps) c.y() = 0.0;
  const GeometryMap flat(r.space(), cps, std::vector<double>(r.weights().begin(), r.weights().end()));
  const TensorSplineSpace sp(make_knot_vector(2, 1, 1), make_knot_vector(2, 1, 1));
  EXPECT_THROW(assemble_volume(flat, sp, kOne, 3), DegenerateGeometryError);
}

TEST(Interface, MatchedTracesGiveNoJump) {
  const MultiPatch mp = two_squares().discretize(3, 2, 2);
  const InterfaceView view = mp.interfaces_of(0).at(0);
  const InterfaceContribution ic = assemble_interface(mp, 0, view, {});
  const TensorSplineSpace& sk = mp.space(0);
  const TensorSplineSpace& sl = mp.space(1);
  // u = (x + 2) y (1 - y): vanishes on the Dirichlet sides, so the neighbor
  // trace (which drops Dirichlet functions) still represents it
  const std::vector<double> tv = knots_of(sk.v());
  const int nv = sk.size_v();
  Eigen::MatrixXd colloc(nv, nv);
  Eigen::VectorXd g(nv);
  for (int i = 0; i < nv; ++i) {
    const double y = sk.v().greville(i);
    g(i) = y * (1 - y);
    for (int j = 0; j < nv; ++j) colloc(i, j) = ref::bspline(tv, 3, j, y);
  }
  const Eigen::VectorXd b = colloc.fullPivLu().solve(g);
  Eigen::VectorXd c(sk.size() + ic.neighbor_basis.size());
  for (int i = 0; i < sk.size(); ++i) c(i) = (sk.u().greville(sk.split(i).first) + 2) * b(sk.split(i).second);
  for (std::size_t m = 0; m < ic.neighbor_basis.size(); ++m) {
    const auto [i, j] = sl.split(ic.neighbor_basis[m]);
    c(sk.size() + m) = (1.0 + sl.u().greville(i) + 2) * b(j);
  }
  const Eigen::VectorXd pen = ic.penalty * c;
  EXPECT_LT(pen.cwiseAbs().maxCoeff(), 1e-12 * max_abs(dense(ic.penalty)));
  EXPECT_LT(std::abs(c.dot(ic.consistency * c)), 1e-12);
}

TEST(Interface, PenaltyScalesWithDegreeSquared) {
  const auto own_block_sum = [](int p) {
    const MultiPatch mp = two_squares().discretize(p, 2, p - 1);
    const InterfaceView view = mp.interfaces_of(0).at(0);
    EXPECT_NEAR(view.mesh_size, 0.25, 1e-14);
    const InterfaceContribution ic = assemble_interface(mp, 0, view, {});
    const int n = mp.space(0).size();
    return dense(ic.penalty).topLeftCorner(n, n).sum();
  };
  const double s2 = own_block_sum(2), s4 = own_block_sum(4);
  // partition of unity on the trace: the own block sums to sigma * |Gamma|
  EXPECT_NEAR(s2, penalty_weight(4.0, 2, 0.25), 1e-11);
  EXPECT_NEAR(s4 / s2, 4.0, 1e-12);
  EXPECT_THROW(penalty_weight(0.0, 2, 0.25), ConfigError);
  EXPECT_THROW(penalty_weight(-1.0, 2, 0.25), ConfigError);
}

TEST(Interface, NonMatchingMeshesAgainstBruteForce) {
  for (int p : {2, 3}) {
    const MultiPatch mp = two_squares().with_spaces(
        {TensorSplineSpace(make_knot_vector(p, 2, p - 1), make_knot_vector(p, 2, p - 1)),
         TensorSplineSpace(make_knot_vector(p, 3, p - 1), make_knot_vector(p, 3, p - 1))});
    const InterfaceView view = mp.interfaces_of(0).at(0);
    ASSERT_EQ(view.own.side, Side::East);
    ASSERT_EQ(view.neighbor.side, Side::West);
    EXPECT_NEAR(view.mesh_size, 0.125, 1e-14);
    const InterfaceContribution ic = assemble_interface(mp, 0, view, {});

    const TensorSplineSpace& sk = mp.space(0);
    const TensorSplineSpace& sl = mp.space(1);
    const std::vector<double> tku = knots_of(sk.u()), tkv = knots_of(sk.v()), tlv = knots_of(sl.v());
    const int n_own = sk.size();
    const int n = n_own + static_cast<int>(ic.neighbor_basis.size());
    // trace value and x-derivative on x = 1 (identity geometry, outward normal +x)
    auto val = [&](int a, double y) {
      if (a >= n_own) return ref::bspline(tlv, p, sl.split(ic.neighbor_basis[a - n_own]).second, y) *
                             (sl.split(ic.neighbor_basis[a - n_own]).first == 0 ? 1.0 : 0.0);
      const auto [i, j] = sk.split(a);
      return ref::bspline(tku, p, i, 1.0) * ref::bspline(tkv, p, j, y);
    };
    auto dn = [&](int a, double y) {
      if (a >= n_own) return 0.0;
      const auto [i, j] = sk.split(a);
      return ref::bspline_derivative(tku, p, i, 1.0) * ref::bspline(tkv, p, j, y);
    };
    const double sigma = penalty_weight(4.0, p, 0.125);
    Eigen::MatrixXd pen = Eigen::MatrixXd::Zero(n, n), cons = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double sa = a < n_own ? -1.0 : 1.0, sb = b < n_own ? -1.0 : 1.0;
        pen(a, b) = sigma * ref::integrate01([&](double y) { return sa * sb * val(a, y) * val(b, y); }, 40);
        // 1/2 dn(u) (v' - v) + 1/2 dn(v) (u' - u) with u = phi_b, v = phi_a
        cons(a, b) = 0.5 * ref::integrate01(
                               [&](double y) { return dn(b, y) * sa * val(a, y) + dn(a, y) * sb * val(b, y); }, 40);
      }
    EXPECT_LT(max_abs(dense(ic.penalty) - pen), 1e-10 * max_abs(pen)) << "p = " << p;
    EXPECT_LT(max_abs(dense(ic.consistency) - cons), 1e-10 * max_abs(cons)) << "p = " << p;
  }
}

TEST(Local, SinglePatchIsPlainGalerkin) {
  const int p = 2;
  const MultiPatch mp = unit_square(p, 2, 1);
  const LocalSystem sys = assemble_local(mp, 0, kOne, {});
  const ExtendedSpaceIndex& idx = sys.index;
  EXPECT_EQ(idx.size(), idx.num_interior);
  EXPECT_TRUE(idx.artificial.empty());

  // textbook tensor-product Galerkin system on the interior functions
  const std::vector<double> t = knots_of(mp.space(0).u());
  const Eigen::MatrixXd m1 = ref::gram_1d(t, p, 0, 16), k1 = ref::gram_1d(t, p, 1, 16);
  const int n1 = static_cast<int>(m1.rows());
  Eigen::VectorXd l1(n1);
  for (int i = 0; i < n1; ++i) l1(i) = ref::integrate01([&](double x) { return ref::bspline(t, p, i, x); }, 16);
  const int ni = n1 - 2;
  Eigen::MatrixXd k(ni * ni, ni * ni);
  Eigen::VectorXd f(ni * ni);
  for (int a = 0; a < ni * ni; ++a) {
    const int ia = a % ni + 1, ja = a / ni + 1;
    f(a) = l1(ia) * l1(ja);
    for (int b = 0; b < ni * ni; ++b) {
      const int ib = b % ni + 1, jb = b / ni + 1;
      k(a, b) = k1(ia, ib) * m1(ja, jb) + m1(ia, ib) * k1(ja, jb);
    }
  }
  const Eigen::VectorXd u_ref = k.llt().solve(f);

  ASSERT_EQ(idx.size(), ni * ni);
  Eigen::VectorXd u_ref_ext(ni * ni);
  for (int e = 0; e < idx.size(); ++e) {
    const auto [i, j] = mp.space(0).split(idx.own_basis[e]);
    u_ref_ext(e) = u_ref((i - 1) + (j - 1) * ni);
  }
  const Eigen::VectorXd u = Eigen::MatrixXd(sys.matrix).llt().solve(sys.rhs);
  EXPECT_LT((u - u_ref_ext).cwiseAbs().maxCoeff(), 1e-12 * u_ref.cwiseAbs().maxCoeff());
}

TEST(Local, DofBookkeeping) {
  for (const MultiPatch& mp : {three_patch_tgrid().discretize(2, 3, 1), default_ring().discretize(3, 2, 1)}) {
    for (int k = 0; k < mp.num_patches(); ++k) {
      const TensorSplineSpace& sp = mp.space(k);
      int interior = 0, own_boundary = 0;
      for (int t = 0; t < sp.size(); ++t) {
        const auto [i, j] = sp.split(t);
        const bool w = i == 0, e = i == sp.size_u() - 1, s = j == 0, n = j == sp.size_v() - 1;
        if (!(w || e || s || n)) {
          ++interior;
          continue;
        }
        const bool dir = (w && mp.is_dirichlet(k, Side::West)) || (e && mp.is_dirichlet(k, Side::East)) ||
                         (s && mp.is_dirichlet(k, Side::South)) || (n && mp.is_dirichlet(k, Side::North));
        if (!dir) ++own_boundary;
      }
      int artificial = 0;
      for (const InterfaceView& v : mp.interfaces_of(k)) {
        const int l = v.neighbor.patch;
        const KnotVector& kv = mp.space(l).direction(along_direction(v.neighbor.side));
        const bool along_u = along_direction(v.neighbor.side) == 0;
        for (int a = 0; a < kv.size(); ++a) {
          const auto [lo, hi] = kv.support(a);
          if (std::min(hi, v.neighbor.end) - std::max(lo, v.neighbor.begin) <= 1e-12) continue;
          if (a == 0 && mp.is_dirichlet(l, along_u ? Side::West : Side::South)) continue;
          if (a == kv.size() - 1 && mp.is_dirichlet(l, along_u ? Side::East : Side::North)) continue;
          ++artificial;
        }
      }
      const ExtendedSpaceIndex idx = build_extended_index(mp, k);
      EXPECT_EQ(idx.num_interior, interior);
      EXPECT_EQ(idx.num_own() - idx.num_interior, own_boundary);
      EXPECT_EQ(static_cast<int>(idx.artificial.size()), artificial);
      EXPECT_EQ(idx.num_skeleton(), own_boundary + artificial);
    }
  }
}

TEST(Local, Symmetric) {
  const MultiPatch mp = default_ring().discretize(3, 2, 2);
  for (int k = 0; k < mp.num_patches(); ++k) {
    const Eigen::MatrixXd a = dense(assemble_local(mp, k, kOne, {}).matrix);
    EXPECT_LT(max_abs(a - a.transpose()), 1e-12 * max_abs(a)) << "patch " << k;
  }
}

TEST(Local, CoercivityEigencheck) {
  for (const auto& [mp, floating_allowed] :
       {std::pair{three_patch_tgrid().discretize(2, 2, 1), false}, std::pair{three_patch_tgrid().discretize(3, 3, 2), false},
        std::pair{default_ring().discretize(2, 1, 1), true}}) {
    for (int k = 0; k < mp.num_patches(); ++k) {
      const LocalSystem sys = assemble_local(mp, k, kOne, {});
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(sys.matrix)).eigenvalues();
      const bool floating = std::none_of(kAllSides.begin(), kAllSides.end(), [&](Side s) { return mp.is_dirichlet(k, s); });
      const double scale = ev.maxCoeff();
      if (floating) {
        // constants on the patch and its artificial interfaces
        ASSERT_TRUE(floating_allowed);
        EXPECT_LT(std::abs(ev(0)), 1e-10 * scale) << "patch " << k;
        EXPECT_GT(ev(1), 1e-8 * scale) << "patch " << k;
      } else {
        EXPECT_GT(ev(0), 1e-8 * scale) << "patch " << k;
      }
      const Eigen::MatrixXd aii = dense(sys.block_II());
      EXPECT_EQ(aii.llt().info(), Eigen::Success);
    }
  }
}

TEST(Local, TripletDump) {
  const MultiPatch mp = three_patch_tgrid().discretize(2, 1, 1);
  const LocalSystem sys = assemble_local(mp, 0, kOne, {});
  std::ostringstream out;
  write_triplets(sys, out);
  std::istringstream in(out.str());
  int rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  EXPECT_EQ(rows, sys.matrix.rows());
  EXPECT_EQ(nnz, sys.matrix.nonZeros());
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(rows, cols);
  for (int e = 0; e < nnz; ++e) {
    int i = 0, j = 0;
    double v = 0;
    in >> i >> j >> v;
    back(i, j) = v;
  }
  EXPECT_EQ(back, dense(sys.matrix));
  std::string tag;
  int i = 0;
  double v = 0;
  in >> tag >> i >> v;
  EXPECT_EQ(tag, "rhs");
  EXPECT_EQ(v, sys.rhs(0));
}
