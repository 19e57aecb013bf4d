#include <random>

#include <gtest/gtest.h>

#include "dgeom/errors.hpp"
#include "dgeom/ncalg.hpp"
#include "oracles.hpp"

using namespace dgeom;

namespace {
Poly random_poly(std::mt19937_64& rng, int nvars, int max_degree, int terms) {
  std::uniform_int_distribution<int> deg(0, max_degree), var(0, nvars - 1);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  Poly p(nvars);
  for (int t = 0; t < terms; ++t) {
    Exponent e(nvars, 0);
    const int k = deg(rng);
    for (int i = 0; i < k; ++i) ++e[var(rng)];
    p.add(e, cdouble(c(rng), c(rng)));
  }
  return p;
}
const ThetaMatrix kTheta = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);
}  // namespace

TEST(Poly, ParseAndPrint) {
  Poly p = parse_poly("(1+2i)*u1^2*u2 - 3 + i*u3", 3);
  EXPECT_EQ(p.degree(), 3);
  EXPECT_EQ(p.terms().at({2, 1, 0}), cdouble(1, 2));
  EXPECT_EQ(p.terms().at({0, 0, 0}), cdouble(-3, 0));
  EXPECT_LT(max_abs_diff(parse_poly(p.to_string(), 3), p), 1e-15);
  EXPECT_EQ(max_abs_diff(parse_poly("u*v", 2), parse_poly("u1*u2", 2)), 0.0);
  EXPECT_THROW(parse_poly("u1 +* u2"), ParseError);
}

TEST(Moyal, MatchesBidifferentialSeries) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    Poly f = random_poly(rng, 4, 3, 4), g = random_poly(rng, 4, 3, 4);
    EXPECT_LT(max_abs_diff(moyal_star(f, g, kTheta), oracle::moyal(f, g, kTheta.theta)), 1e-13);
  }
}

TEST(Moyal, LinearClosedForm) {
  // u_i * f = u_i f + (i/2) theta^{ij} d_j f
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    Poly f = random_poly(rng, 4, 4, 5);
    for (int i = 0; i < 4; ++i) {
      Poly want = Poly::var(4, i) * f;
      for (int j = 0; j < 4; ++j) want += f.derivative(j) * cdouble(0.0, 0.5 * kTheta.theta(i, j));
      EXPECT_LT(max_abs_diff(moyal_star(Poly::var(4, i), f, kTheta), want), 1e-14);
    }
  }
}

TEST(Moyal, AssociativeAndUnital) {
  std::mt19937_64 rng(3);
  Poly one = Poly::constant(4, 1.0);
  for (int k = 0; k < 20; ++k) {
    Poly f = random_poly(rng, 4, 4, 5), g = random_poly(rng, 4, 4, 5), h = random_poly(rng, 4, 4, 5);
    EXPECT_LT(max_abs_diff(moyal_star(moyal_star(f, g, kTheta), h, kTheta),
                           moyal_star(f, moyal_star(g, h, kTheta), kTheta)),
              1e-12);
    EXPECT_LT(max_abs_diff(moyal_star(one, f, kTheta), f), 1e-15);
  }
}

TEST(Moyal, ThetaValidation) {
  EXPECT_THROW(ThetaMatrix::from_csv("1,2", 4), ConfigError);
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  EXPECT_THROW(ThetaMatrix::from_matrix(s), ConfigError);
}

TEST(Lie, StructureChecks) {
  LieStructure L = LieStructure::su2();
  EXPECT_LT(L.jacobi_residual(), 1e-15);
  EXPECT_LT(L.antisymmetry_residual(), 1e-15);
  EXPECT_DOUBLE_EQ(L.at(0, 1, 2), 1.0);
}

TEST(Lie, CommutatorIsStructure) {
  LieStructure L = LieStructure::su2();
  for (int order : {1, 2})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Poly want(3);
        for (int k = 0; k < 3; ++k) want += Poly::var(3, k, cdouble(0.0, L.at(i, j, k)));
        EXPECT_LT(max_abs_diff(star_commutator(Poly::var(3, i), Poly::var(3, j), LieProduct{L, order}), want),
                  1e-15);
      }
}

TEST(Lie, HeisenbergReducesToMoyal) {
  // quadratic inputs: the order-2 kernel is exact, so z -> 1 gives the Moyal product
  std::mt19937_64 rng(4);
  LieProduct lie{LieStructure::heisenberg(kTheta), 2};
  for (int k = 0; k < 10; ++k) {
    Poly f = random_poly(rng, 4, 2, 3), g = random_poly(rng, 4, 2, 3);
    Poly l = star(f.widen(5), g.widen(5), lie), set(4);
    for (const auto& [e, c] : l.terms()) set.add(Exponent(e.begin(), e.begin() + 4), c);
    EXPECT_LT(max_abs_diff(set, moyal_star(f, g, kTheta)), 1e-13);
  }
}

TEST(QPlane, RewritingOracle) {
  const cdouble q(0.8, 0.35);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    Poly f = random_poly(rng, 2, 4, 3), g = random_poly(rng, 2, 4, 3), h = random_poly(rng, 2, 4, 3);
    EXPECT_LT(max_abs_diff(qplane_star(f, g, q), oracle::qplane_words(f, g, q)), 1e-13);
    EXPECT_LT(max_abs_diff(qplane_star(qplane_star(f, g, q), h, q), qplane_star(f, qplane_star(g, h, q), q)),
              1e-12);
  }
}

TEST(QPlane, SymmetricOrdering) {
  const cdouble q(0.8, 0.35);
  Poly u = Poly::var(2, 0), v = Poly::var(2, 1);
  auto S = QPlaneOrdering::Symmetric;
  EXPECT_LT(max_abs_diff(qplane_star(v, u, q, S), qplane_star(u, v, q, S) * (1.0 / q)), 1e-15);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    Poly f = random_poly(rng, 2, 3, 3), g = random_poly(rng, 2, 3, 3);
    Poly lhs = qplane_symmetric_to_normal(qplane_star(f, g, q, S), q);
    Poly rhs = qplane_star(qplane_symmetric_to_normal(f, q), qplane_symmetric_to_normal(g, q), q);
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
  }
}
