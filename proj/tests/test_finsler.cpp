#include <gtest/gtest.h>

#include "dgeom/catalog.hpp"
#include "dgeom/curvature.hpp"
#include "dgeom/errors.hpp"
#include "dgeom/finsler.hpp"
#include "oracles.hpp"

using namespace dgeom;

namespace {
std::vector<std::vector<double>> pts(BundleShape s, int n, std::uint64_t seed = 51) {
  SampleSpec spec;
  spec.count = n;
  spec.seed = seed;
  return sample_points(s, spec);
}
}  // namespace

class FinslerBuiltin : public ::testing::TestWithParam<std::pair<const char*, int>> {};

TEST_P(FinslerBuiltin, Homogeneity) {
  auto [id, n] = GetParam();
  FinslerFunction F = FinslerFunction::builtin(id, n);
  for (const auto& u : pts(F.shape(), 10)) {
    EXPECT_LT(homogeneity_residual(F, u), 1e-9);
    Eigen::MatrixXd g = finsler_metric(F, u).g, N = cartan_nconnection(F, u);
    EXPECT_TRUE(finsler_metric(F, u).positive_definite());
    for (double s : {0.5, 2.0, 3.0}) {
      std::vector<double> v = u;
      for (int i = n; i < 2 * n; ++i) v[i] *= s;
      EXPECT_LT((finsler_metric(F, v).g - g).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((cartan_nconnection(F, v) - s * N).cwiseAbs().maxCoeff(), 1e-8);
    }
    EXPECT_LT(kahler_form_closure(F, u), 1e-7);
  }
}

TEST_P(FinslerBuiltin, MetricIsHalfHessianOfF2) {
  auto [id, n] = GetParam();
  FinslerFunction F = FinslerFunction::builtin(id, n);
  for (const auto& u : pts(F.shape(), 3)) {
    Eigen::MatrixXd g = finsler_metric(F, u).g;
    auto F2 = [&](const std::vector<double>& x) { return F.F2().eval(x); };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto dj = [&](const std::vector<double>& x) { return oracle::d5(F2, x, n + j, 1e-3); };
        EXPECT_NEAR(g(i, j), 0.5 * oracle::d5(dj, u, n + i, 1e-3), 1e-7);
      }
  }
}

INSTANTIATE_TEST_SUITE_P(Builtins, FinslerBuiltin,
                         ::testing::Values(std::pair{"euclidean", 2}, std::pair{"quartic", 2},
                                           std::pair{"riemann", 2}, std::pair{"riemann", 3},
                                           std::pair{"randers", 2}, std::pair{"randers", 3}));

TEST(Finsler, EuclideanIsFlat) {
  FinslerGeometry geo(FinslerFunction::builtin("euclidean", 2));
  for (const auto& u : pts(geo.shape(), 5)) {
    EXPECT_LT((finsler_metric(geo.function(), u).g - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(),
              1e-14);
    EXPECT_LT(max_abs(d_curvature(geo, ConnectionSelector::canonical(), u).R), 1e-12);
  }
}

TEST(Finsler, RiemannReductionOfN) {
  const std::vector<std::vector<std::string>> rows = {{"1+0.2*x1^2", "0.1*x1*x2"},
                                                     {"0.1*x1*x2", "1+0.3*x2^2+0.1*sin(x1)"}};
  FinslerFunction F =
      FinslerFunction::builtin("riemann:1+0.2*x1^2,0.1*x1*x2;0.1*x1*x2,1+0.3*x2^2+0.1*sin(x1)", 2);
  auto g = oracle::block(rows, F.shape());
  for (const auto& u : pts(F.shape(), 10)) {
    RealTensor G = oracle::christoffel(g, u, 0);
    Eigen::MatrixXd N = cartan_nconnection(F, u);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(N(i, j), G(i, j, 0) * u[2] + G(i, j, 1) * u[3], 1e-9);
  }
}

TEST(Finsler, ExpressionInput) {
  FinslerFunction F = FinslerFunction::from_expr("sqrt(y1^2 + 2*y2^2) + 0.1*y1", 2);
  for (const auto& u : pts(F.shape(), 5)) EXPECT_LT(homogeneity_residual(F, u), 1e-12);
  EXPECT_THROW(FinslerFunction::from_expr("sqrt(y1^2+", 2), ParseError);
}

TEST(Finsler, ZeroSectionRejected) {
  FinslerFunction F = FinslerFunction::builtin("euclidean", 2);
  std::vector<double> u = {0.1, 0.2, 0.0, 0.0};
  EXPECT_THROW(finsler_metric(F, u), DomainError);
}

TEST(Finsler, AlmostComplexSquaresToMinusOne) {
  for (int n : {1, 2, 3}) {
    Eigen::MatrixXd I = almost_complex_structure(n);
    EXPECT_LT((I * I + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff(), 1e-15);
  }
}
