#include <random>

#include <gtest/gtest.h>

#include "dgeom/catalog.hpp"
#include "dgeom/errors.hpp"
#include "dgeom/gauge_sw.hpp"

using namespace dgeom;

namespace {
const BundleShape kShape{2, 2};
const ThetaMatrix kTheta = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);

std::string rand_field(std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, 2);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%.5f + %.5f*x%d + %.5f*y%d*x%d + %.5f*y%d^3", 0.3 * N(rng), 0.3 * N(rng),
                pick(rng), 0.3 * N(rng), pick(rng), pick(rng), 0.2 * N(rng), pick(rng));
  return buf;
}

GaugeLevel1 random_level1(int S, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> q(4, std::vector<std::string>(S));
  std::vector<std::string> g(S);
  for (auto& r : q)
    for (auto& e : r) e = rand_field(rng);
  for (auto& e : g) e = rand_field(rng);
  return GaugeLevel1::parse(q, g, kShape);
}

std::vector<double> u0() { return {0.3, -0.5, 0.8, 0.4}; }
}  // namespace

TEST(DeSitter, Relations) {
  for (auto eta : {std::array<int, 5>{1, 1, 1, 1, -1}, std::array<int, 5>{1, -1, -1, -1, -1},
                   std::array<int, 5>{1, 1, 1, 1, 1}}) {
    DeSitterAlgebra A = desitter_algebra(eta, 1.3);
    EXPECT_EQ(A.T.size(), 10u);
    EXPECT_LT(desitter_commutator_residual(A), 1e-12);
    auto s = desitter_split_residuals(A);
    EXPECT_LT(std::max({s.ff, s.pp, s.pf}), 1e-12);
    EXPECT_LT(desitter_matrix_jacobi(A), 1e-12);
    EXPECT_LT(A.structure.jacobi_residual(), 1e-12);
  }
  EXPECT_THROW(desitter_algebra({1, 2, 1, 1, 1}, 1.0), ConfigError);
  EXPECT_THROW(desitter_algebra({1, 1, 1, 1, 1}, 0.0), ConfigError);
}

TEST(DeSitter, RepresentationsRealizeBrackets) {
  EXPECT_LT(GaugeRepresentation::desitter(desitter_algebra({1, 1, 1, 1, -1}, 1.0)).bracket_residual(), 1e-12);
  EXPECT_LT(GaugeRepresentation::su2().bracket_residual(), 1e-12);
}

TEST(Gauge, CurvatureAntisymmetricAndVariationCovariant) {
  const LieStructure L = LieStructure::su2();
  GaugeLevel1 f = random_level1(3, 3);
  RealTensor R = gauge_curvature(f, L, u0());
  for (int t = 0; t < 4; ++t)
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 3; ++a) EXPECT_NEAR(R(t, m, a), -R(m, t, a), 1e-14);
  // Infinitesimally, delta R = -f gamma R (adjoint), checked by differencing q + eps dq.
  GaugeJets J = gauge_jets(f, u0(), 3);
  JetTensor dq = gauge_variation_jets(J.q, J.gamma, L);
  const double eps = 1e-6;
  JetTensor qp = J.q, qm = J.q;
  for (std::size_t k = 0; k < qp.size(); ++k) {
    qp(int(k)) += dq(int(k)) * eps;
    qm(int(k)) -= dq(int(k)) * eps;
  }
  RealTensor Rp = values(gauge_curvature_jets(qp, L)), Rm = values(gauge_curvature_jets(qm, L));
  for (int t = 0; t < 4; ++t)
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 3; ++a) {
        double want = 0.0;
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c) want -= L.at(b, c, a) * J.gamma(b).value() * R(t, m, c);
        EXPECT_NEAR((Rp(t, m, a) - Rm(t, m, a)) / (2 * eps), want, 1e-6);
      }
}

TEST(Gauge, SwExpansionLinearAndVanishing) {
  DeSitterAlgebra A = desitter_algebra({1, 1, 1, 1, -1}, 1.0);
  GaugeLevel1 f = random_level1(10, 4);
  auto z = sw_expand(f, ThetaMatrix::from_matrix(Eigen::MatrixXd::Zero(4, 4)), A.structure, u0());
  EXPECT_EQ(max_abs(z.q2), 0.0);
  EXPECT_EQ(max_abs(z.gamma2), 0.0);
  auto a = sw_expand(f, kTheta, A.structure, u0());
  auto b = sw_expand(f, ThetaMatrix::from_matrix(-3.0 * kTheta.theta), A.structure, u0());
  for (std::size_t k = 0; k < a.q2.size(); ++k) EXPECT_NEAR(b.q2(int(k)), -3.0 * a.q2(int(k)), 1e-12);
  // symmetric in (a, b)
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) EXPECT_NEAR(a.q2(m, i, j), a.q2(m, j, i), 1e-15);
}

TEST(Gauge, SwResidualIsSecondOrder) {
  const GaugeRepresentation rep = GaugeRepresentation::su2();
  GaugeLevel1 f = random_level1(3, 5);
  GaugeJets J = gauge_jets(f, u0(), 3);
  SwResidual r = sw_residual(J, kTheta, rep, {1.0, 0.5, 0.25, 0.125});
  EXPECT_LT(std::max(r.order0, r.order1), 1e-12);
  EXPECT_NEAR(r.slope, 2.0, 0.1);
  EXPECT_LT(covariance_residual(J, kTheta, rep), 1e-9);
}

TEST(Gauge, CoefficientMatchesMatrixForm) {
  const GaugeRepresentation rep = GaugeRepresentation::su2();
  GaugeLevel1 f = random_level1(3, 6);
  GaugeJets J = gauge_jets(f, u0(), 3);
  auto cc = corrected_curvature(J, kTheta, rep.L);
  for (int t = 0; t < 4; ++t)
    for (int l = 0; l < 4; ++l) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(cc.R2(t, l, a, b), -cc.R2(l, t, a, b), 1e-12);
      if (t == l) continue;
      auto M = corrected_curvature_matrix(J, kTheta, rep, t, l);
      std::vector<double> c1(3), c2(9);
      for (int a = 0; a < 3; ++a) {
        c1[a] = cc.R1(t, l, a);
        for (int b = 0; b < 3; ++b) c2[a * 3 + b] = cc.R2(t, l, a, b);
      }
      EXPECT_LT((envelope(rep, c1) - M[0]).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((envelope(rep, {}, c2) - M[1]).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Gauge, FlatLagrangianIsCosmologicalTerm) {
  auto flat = builtin_geometry("flat");
  const GaugeConstants C{0.8, 1.3};
  for (const auto& u : {u0(), std::vector<double>{-0.7, 0.2, 1.5, -0.3}}) {
    GaugeStrength s = gauge_strength(*flat, ConnectionSelector::canonical(), u);
    EXPECT_NEAR(lagrangian_density(s, C), 2.0 * C.lambda1() / C.l2(), 1e-14);
  }
}

TEST(Gauge, LagrangianFrameRotationInvariant) {
  auto src = builtin_geometry("anisotropic");
  const GaugeConstants C{0.8, 1.3};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  GaugeStrength s = gauge_strength(*src, ConnectionSelector::canonical(), u0());
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::MatrixXd X(4, 4);
    for (int i = 0; i < 16; ++i) X(i) = N(rng);
    Eigen::MatrixXd O = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ();
    GaugeStrength t = s;
    for (int a = 0; a < 4; ++a)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          double v = 0.0;
          for (int b = 0; b < 4; ++b) v += O(a, b) * s.T(b, m, n);
          t.T(a, m, n) = v;
          for (int b = 0; b < 4; ++b) {
            double w = 0.0;
            for (int c = 0; c < 4; ++c)
              for (int e = 0; e < 4; ++e) w += O(a, c) * s.R(c, e, m, n) * O(b, e);
            t.R(a, b, m, n) = w;
          }
        }
    EXPECT_NEAR(lagrangian_density(t, C), lagrangian_density(s, C), 1e-10);
  }
}

TEST(Gauge, BridgeReproducesDCurvature) {
  for (const char* id : {"sphere2xflat", "anisotropic", "pure_gauge"}) {
    auto src = builtin_geometry(id);
    auto b = gauge_geometry_bridge(*src, ConnectionSelector::canonical(), 0.7, u0());
    EXPECT_LT(std::max({b.projection_residual, b.curvature_residual, b.torsion_residual}), 1e-8) << id;
    EXPECT_LT(max_abs_diff(b.gauge_F, b.geometry_F), 1e-8) << id;
  }
  EXPECT_THROW(gauge_geometry_bridge(*builtin_geometry("flat:3,2"), ConnectionSelector::canonical(), 0.7,
                                     std::vector<double>(5, 0.5)),
               ConfigError);
}

TEST(Gauge, NonlinearPotentialTwoRoutes) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N(0.0, 1.0);
  CosetData c;
  Eigen::Vector4d t;
  for (int i = 0; i < 4; ++i) t(i) = 0.5 * N(rng);
  c.t.head<4>() = t;
  c.t(4) = std::sqrt(1.0 + t.squaredNorm());
  c.dt = Eigen::MatrixXd(5, 4);
  for (int mu = 0; mu < 4; ++mu) {
    Eigen::Matrix4d X;
    for (int i = 0; i < 16; ++i) X(i) = N(rng);
    c.omega.push_back(X - X.transpose());
    Eigen::Vector4d th, dt;
    for (int i = 0; i < 4; ++i) th(i) = N(rng), dt(i) = N(rng);
    c.theta_tilde.push_back(th);
    c.dt.col(mu).head<4>() = dt;
    c.dt(4, mu) = t.dot(dt) / c.t(4);
  }
  auto a = nonlinear_potential(c), b = dressed_potential(c);
  for (int mu = 0; mu < 4; ++mu) EXPECT_LT((a[mu] - b[mu]).cwiseAbs().maxCoeff(), 1e-12);
}
