#include <gtest/gtest.h>

#include "dgeom/catalog.hpp"
#include "dgeom/curvature.hpp"
#include "dgeom/jet_linalg.hpp"
#include "oracles.hpp"

using namespace dgeom;

namespace {
std::vector<std::vector<double>> pts(BundleShape s, int n, std::uint64_t seed = 31) {
  SampleSpec spec;
  spec.count = n;
  spec.seed = seed;
  return sample_points(s, spec);
}
}  // namespace

class Metricity : public ::testing::TestWithParam<std::string> {};

TEST_P(Metricity, BothConnectionsAreCompatible) {
  auto src = builtin_geometry(GetParam());
  for (const auto& u : pts(src->shape(), 25)) {
    GeometryJets G = src->jets(u, 1);
    for (const auto& sel : {ConnectionSelector::canonical(), ConnectionSelector::levi_civita()})
      EXPECT_LT(metric_compatibility_residual(values(connection_jets(G, sel)), G), 1e-9) << GetParam();
  }
}

INSTANTIATE_TEST_SUITE_P(Builtins, Metricity,
                         ::testing::Values("flat", "sphere2xflat", "anisotropic", "pure_gauge", "blockdiag",
                                           "finsler:euclidean", "finsler:riemann", "finsler:quartic",
                                           "finsler:randers", "finsler:randers@3", "sphere2xflat:2,3"));

TEST(Connection, SplitAndAssembleRoundTrip) {
  auto src = builtin_geometry("anisotropic");
  for (const auto& u : pts(src->shape(), 5)) {
    RealTensor G = values(connection_jets(src->jets(u, 1), ConnectionSelector::canonical()));
    EXPECT_EQ(max_abs_diff(assemble(split_families(G, src->shape())), G), 0.0);
    auto c = canonical_dconnection(*src, u);
    EXPECT_LT(max_abs_diff(assemble(c), G), 1e-15);
  }
}

TEST(Connection, LeviCivitaDiffersFromCanonicalWhenCurved) {
  auto src = builtin_geometry("anisotropic");
  double w = 0.0;
  for (const auto& u : pts(src->shape(), 10))
    w = std::max(w, max_abs_diff(assemble(canonical_dconnection(*src, u)),
                                 assemble(levi_civita_anholonomic(*src, u))));
  EXPECT_GT(w, 1e-3);
}

TEST(Connection, PureGaugeCoincidence) {
  auto src = builtin_geometry("pure_gauge");
  for (const auto& u : pts(src->shape(), 20))
    EXPECT_LT(max_abs_diff(assemble(canonical_dconnection(*src, u)), assemble(levi_civita_anholonomic(*src, u))),
              1e-10);
}

TEST(Connection, ChristoffelReductionAgainstDifferences) {
  auto src = builtin_geometry("blockdiag");
  oracle::MatrixFn g = [&](const oracle::Point& x) { return value_matrix(src->jets(x, 0).g); };
  oracle::MatrixFn h = [&](const oracle::Point& x) { return value_matrix(src->jets(x, 0).h); };
  for (const auto& u : pts(src->shape(), 10)) {
    auto c = canonical_dconnection(*src, u);
    EXPECT_LT(max_abs_diff(c.L_hh, oracle::christoffel(g, u, 0)), 1e-10);
    EXPECT_LT(max_abs_diff(c.C_vv_v, oracle::christoffel(h, u, 2)), 1e-10);
  }
}

TEST(Connection, CanonicalBlocks) {
  // L^a_bk = d_b N_k^a + 1/2 h^ac (delta_k h_bc - (d_b N_k^d) h_dc - (d_c N_k^d) h_db)
  // C^i_jc = 1/2 g^ik d_c g_jk
  auto src = builtin_geometry("anisotropic");
  for (const auto& u : pts(src->shape(), 5)) {
    auto c = canonical_dconnection(*src, u);
    GeometryJets G = src->jets(u, 1);
    Eigen::MatrixXd gi = value_matrix(G.g).inverse(), hi = value_matrix(G.h).inverse();
    auto delta = [&](const Jet& f, int k) {
      double s = f.d1(k);
      for (int e = 0; e < 2; ++e) s -= G.N(e, k).value() * f.d1(2 + e);
      return s;
    };
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
          double want = 0.0;
          for (int k = 0; k < 2; ++k) want += 0.5 * gi(i, k) * G.g(j, k).d1(2 + a);
          EXPECT_NEAR(c.C_hh_v(i, j, a), want, 1e-13);
        }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int k = 0; k < 2; ++k) {
          double want = G.N(a, k).d1(2 + b);
          for (int cc = 0; cc < 2; ++cc) {
            double t = delta(G.h(b, cc), k);
            for (int d = 0; d < 2; ++d)
              t -= G.N(d, k).d1(2 + b) * G.h(d, cc).value() + G.N(d, k).d1(2 + cc) * G.h(d, b).value();
            want += 0.5 * hi(a, cc) * t;
          }
          EXPECT_NEAR(c.L_vv_h(a, b, k), want, 1e-13);
        }
  }
}

TEST(Connection, UserConnectionIsEvaluated) {
  BundleShape s{1, 1};
  auto uc = std::make_shared<UserConnection>();
  uc->shape = s;
  uc->L_hh = {parse_field("x1", s)};
  uc->L_vv_h = {parse_field("2*y1", s)};
  uc->C_hh_v = {parse_field("3", s)};
  uc->C_vv_v = {parse_field("x1*y1", s)};
  auto src = builtin_geometry("flat:1,1");
  std::vector<double> u = {0.5, 2.0};
  RealTensor G = values(connection_jets(src->jets(u, 1), ConnectionSelector::from_user(uc)));
  EXPECT_DOUBLE_EQ(G(0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(G(1, 1, 0), 4.0);
  EXPECT_DOUBLE_EQ(G(0, 0, 1), 3.0);
  EXPECT_DOUBLE_EQ(G(1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(G(0, 1, 0), 0.0);
}
