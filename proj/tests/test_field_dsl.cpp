#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dgeom/catalog.hpp"
#include "dgeom/errors.hpp"
#include "dgeom/field_dsl.hpp"
#include "oracles.hpp"

using namespace dgeom;

namespace {
const BundleShape kShape{2, 2};

std::vector<double> at(double a, double b, double c, double d) { return {a, b, c, d}; }
}  // namespace

TEST(FieldDsl, EvaluatesArithmetic) {
  auto f = parse_field("1 + 2*x1 - y2/4 + x2^3", kShape);
  EXPECT_DOUBLE_EQ(f.eval(at(0.5, 2.0, 0.0, 1.0)), 1 + 1.0 - 0.25 + 8.0);
  EXPECT_DOUBLE_EQ(parse_field("-x1^2", kShape).eval(at(3, 0, 0, 0)), -9.0);
  EXPECT_DOUBLE_EQ(parse_field("2^-1", kShape).eval(at(0, 0, 0, 0)), 0.5);
}

TEST(FieldDsl, Functions) {
  auto u = at(0.3, 0.7, 1.1, 0.2);
  EXPECT_NEAR(parse_field("sin(x1)*cos(x2)", kShape).eval(u), std::sin(0.3) * std::cos(0.7), 1e-15);
  EXPECT_NEAR(parse_field("exp(y1) + log(y1) + sqrt(y1) + tan(x1)", kShape).eval(u),
              std::exp(1.1) + std::log(1.1) + std::sqrt(1.1) + std::tan(0.3), 1e-14);
}

TEST(FieldDsl, PolynomialJetIsExact) {
  // Taylor coefficients of a cubic are its polynomial coefficients.
  auto f = parse_field("x1^3 + 2*x1*y1 - y2^2", kShape);
  Jet j = f.eval_jet(at(0, 0, 0, 0), 4);
  EXPECT_DOUBLE_EQ(j.coeff({3, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(j.coeff({1, 0, 1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(j.coeff({0, 0, 0, 2}), -1.0);
  EXPECT_DOUBLE_EQ(j.coeff({4, 0, 0, 0}), 0.0);
  Jet k = f.eval_jet(at(1.5, 0, -2, 0), 3);
  EXPECT_DOUBLE_EQ(k.partial({2, 0, 0, 0}), 9.0);
  EXPECT_DOUBLE_EQ(k.partial({3, 0, 0, 0}), 6.0);
}

TEST(FieldDsl, JetsMatchDifferences) {
  auto fs = random_test_fields(kShape, 10, 3);
  SampleSpec spec;
  spec.count = 20;
  for (const auto& u : sample_points(kShape, spec))
    for (const auto& f : fs) {
      Jet j = f.eval_jet(u, 2);
      auto F = [&](const std::vector<double>& x) { return f.eval(x); };
      for (int v = 0; v < 4; ++v) {
        EXPECT_NEAR(j.d1(v), oracle::d5(F, u, v, 1e-3), 1e-9);
        auto dF = [&](const std::vector<double>& x) { return oracle::d5(F, x, v, 1e-3); };
        EXPECT_NEAR(j.derivative(v).d1(v), oracle::d5(dF, u, v, 1e-3), 1e-6);
      }
    }
}

TEST(FieldDsl, ProductRule) {
  auto f = parse_field("sin(x1*y1) + x2", kShape), g = parse_field("exp(y2) - x1^2", kShape);
  auto fg = parse_field("(sin(x1*y1) + x2)*(exp(y2) - x1^2)", kShape);
  auto u = at(0.4, -0.2, 0.9, 0.3);
  Jet a = f.eval_jet(u, 3), b = g.eval_jet(u, 3), c = fg.eval_jet(u, 3);
  for (int v = 0; v < 4; ++v)
    EXPECT_NEAR(c.d1(v), a.d1(v) * b.value() + a.value() * b.d1(v), 1e-14);
  EXPECT_NEAR(c.partial({1, 0, 1, 0}),
              a.partial({1, 0, 1, 0}) * b.value() + a.partial({1, 0, 0, 0}) * b.partial({0, 0, 1, 0}) +
                  a.partial({0, 0, 1, 0}) * b.partial({1, 0, 0, 0}) + a.value() * b.partial({1, 0, 1, 0}),
              1e-13);
}

TEST(FieldDsl, PrintReparseRoundTrip) {
  auto fs = random_test_fields(kShape, 10, 9);
  fs.push_back(parse_field("-(x1 - y1)^2/(1 + x2^2) + tan(0.1*y2)", kShape));
  SampleSpec spec;
  spec.count = 100;
  auto pts = sample_points(kShape, spec);
  for (const auto& f : fs) {
    auto g = parse_field(f.to_string(), kShape);
    EXPECT_EQ(g.to_string(), f.to_string());
    for (const auto& u : pts) EXPECT_NEAR(g.eval(u), f.eval(u), 1e-12 * std::max(1.0, std::abs(f.eval(u))));
  }
}

TEST(FieldDsl, ErrorPositions) {
  try {
    parse_field("1+*x1", kShape);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 2u);
    EXPECT_EQ(e.status(), 3);
  }
  EXPECT_THROW(parse_field("x3", kShape), ParseError);
  EXPECT_THROW(parse_field("y1^x1", kShape), ParseError);
  EXPECT_THROW(parse_field("sin(x1", kShape), ParseError);
  EXPECT_THROW(parse_field("foo(x1)", kShape), ParseError);
  EXPECT_THROW(parse_field("", kShape), ParseError);
}

TEST(FieldDsl, DomainErrors) {
  EXPECT_THROW(parse_field("log(x1)", kShape).eval(at(-1, 0, 0, 0)), DomainError);
  EXPECT_THROW(parse_field("1/x1", kShape).eval(at(0, 0, 0, 0)), DomainError);
  EXPECT_THROW(parse_field("sqrt(y1)", kShape).eval(at(0, 0, -1, 0)), DomainError);
}

TEST(FieldDsl, ShapeValidation) {
  EXPECT_THROW(validate(BundleShape{0, 1}), ConfigError);
  EXPECT_THROW(validate(BundleShape{4, 3}), ConfigError);
  EXPECT_NO_THROW(validate(BundleShape{3, 3}));
}
