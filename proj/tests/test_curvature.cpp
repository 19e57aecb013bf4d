#include <gtest/gtest.h>

#include "dgeom/catalog.hpp"
#include "dgeom/curvature.hpp"
#include "dgeom/jet_linalg.hpp"
#include "oracles.hpp"

using namespace dgeom;

namespace {
std::vector<std::vector<double>> pts(BundleShape s, int n, std::uint64_t seed = 41) {
  SampleSpec spec;
  spec.count = n;
  spec.seed = seed;
  return sample_points(s, spec);
}
const auto kCanon = ConnectionSelector::canonical();
}  // namespace

TEST(Curvature, TorsionFamiliesReassemble) {
  auto an = builtin_geometry("anisotropic");
  for (const auto& u : pts(an->shape(), 10)) {
    TorsionPoint T = d_torsion(*an, kCanon, u);
    EXPECT_LT(max_abs_diff(assemble_torsion(T), T.T), 1e-12);
    GeometryJets G = an->jets(u, 1);
    RealTensor Om = n_curvature_values(G);
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(T.T_vhh(a, i, j), -Om(a, i, j), 1e-14);
    // canonical: T^i_jk = 0 and S^a_bc = 0
    EXPECT_LT(max_abs(T.T_hh), 1e-14);
    EXPECT_LT(max_abs(T.S_vv), 1e-14);
  }
}

TEST(Curvature, TorsionAntisymmetric) {
  auto an = builtin_geometry("anisotropic");
  for (const auto& u : pts(an->shape(), 5)) {
    RealTensor T = d_torsion(*an, kCanon, u).T;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) EXPECT_NEAR(T(a, b, c), -T(a, c, b), 1e-14);
  }
}

TEST(Curvature, AntisymmetricInFormIndices) {
  for (const char* id : {"anisotropic", "finsler:randers"}) {
    auto src = builtin_geometry(id);
    for (const auto& u : pts(src->shape(), 5)) {
      RealTensor R = d_curvature(*src, kCanon, u).R;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int g = 0; g < 4; ++g)
            for (int t = 0; t < 4; ++t) EXPECT_NEAR(R(a, b, g, t), -R(a, b, t, g), 1e-12) << id;
    }
  }
}

TEST(Curvature, BlocksStayInFamilies) {
  // A d-connection never mixes horizontal and vertical frame indices.
  auto an = builtin_geometry("anisotropic");
  for (const auto& u : pts(an->shape(), 5)) {
    RealTensor R = d_curvature(*an, kCanon, u).R;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if ((a < 2) != (b < 2))
          for (int g = 0; g < 4; ++g)
            for (int t = 0; t < 4; ++t) EXPECT_EQ(R(a, b, g, t), 0.0);
  }
}

TEST(Curvature, JetsMatchFiniteDifferences) {
  for (const char* id : {"anisotropic", "pure_gauge", "sphere2xflat"})
    for (const auto& sel : {kCanon, ConnectionSelector::levi_civita()}) {
      auto src = builtin_geometry(id);
      for (const auto& u : pts(src->shape(), 3))
        EXPECT_LT(max_abs_diff(d_curvature(*src, sel, u).R, oracle::curvature(*src, sel, u)), 1e-7) << id;
    }
}

TEST(Curvature, DirectFamiliesMatchAssembled) {
  auto an = builtin_geometry("anisotropic");
  for (const auto& u : pts(an->shape(), 5)) {
    auto a = d_curvature(*an, kCanon, u);
    auto b = curvature_families_direct(an->jets(u, 2), kCanon);
    for (auto [x, y] : {std::pair{&a.R_h, &b.R_h}, {&a.R_v, &b.R_v}, {&a.P_h, &b.P_h}, {&a.P_v, &b.P_v},
                        {&a.S_h, &b.S_h}, {&a.S_v, &b.S_v}})
      EXPECT_LT(max_abs_diff(*x, *y), 1e-10);
  }
}

TEST(Curvature, SphereScalar) {
  for (double r : {0.5, 1.0, 2.5}) {
    auto src = builtin_geometry("sphere2xflat:" + std::to_string(r));
    for (const auto& u : pts(src->shape(), 10)) {
      RicciPoint R = ricci_scalar(d_curvature(*src, kCanon, u), src->jets(u, 2));
      EXPECT_NEAR(R.Rhat, 2.0 / (r * r), 1e-8);
      EXPECT_NEAR(R.S, 0.0, 1e-12);
    }
  }
}

TEST(Curvature, HorizontalBlockIsClassicalRiemann) {
  auto src = builtin_geometry("blockdiag");
  oracle::MatrixFn g = [&](const oracle::Point& x) { return value_matrix(src->jets(x, 0).g); };
  for (const auto& u : pts(src->shape(), 5)) {
    RealTensor R = d_curvature(*src, kCanon, u).R, Rc = oracle::riemann(g, u, 0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) EXPECT_NEAR(R(i, j, k, l), Rc(i, j, l, k), 1e-8);
  }
}

TEST(Curvature, RicciAsymmetryOnAnisotropic) {
  auto an = builtin_geometry("anisotropic");
  double w = 0.0;
  for (const auto& u : pts(an->shape(), 10)) {
    RicciPoint R = ricci_scalar(d_curvature(*an, kCanon, u), an->jets(u, 2));
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i) w = std::max(w, std::abs(R.P1(a, i) - R.P2(i, a)));
  }
  EXPECT_GT(w, 1e-6);
}

TEST(Curvature, EinsteinSelfConsistentSources) {
  auto src = builtin_geometry("anisotropic");
  for (const auto& u : pts(src->shape(), 3)) {
    GeometryJets G = src->jets(u, 2);
    RicciPoint R = ricci_scalar(d_curvature(*src, kCanon, u), G);
    EinsteinSources s = einstein_blocks(R, G);
    const double kappa = 2.0;
    for (auto* t : {&s.ij, &s.ab, &s.ai, &s.ia})
      for (auto& v : t->data()) v /= kappa;
    EXPECT_LT(einstein_residual(R, G, kappa, s).max_abs, 1e-12);
    EXPECT_GT(einstein_residual(R, G, kappa, {}).max_abs, 1e-6);
  }
}
