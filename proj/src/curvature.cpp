#include "dgeom/curvature.hpp"

#include "dgeom/jet_linalg.hpp"

namespace dgeom {

TorsionPoint torsion_from(const RealTensor& Gam, const RealTensor& W, BundleShape s) {
  const int n = s.n, m = s.m, d = n + m;
  TorsionPoint t;
  t.shape = s;
  t.T = RealTensor({d, d, d}, 0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) t.T(a, b, c) = Gam(a, b, c) - Gam(a, c, b) + W(a, b, c);
  t.T_hh = RealTensor({n, n, n}, 0.0);
  t.C_hv = RealTensor({n, n, m}, 0.0);
  t.S_vv = RealTensor({m, m, m}, 0.0);
  t.T_vhh = RealTensor({m, n, n}, 0.0);
  t.T_vvh = RealTensor({m, m, n}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) t.T_hh(i, j, k) = t.T(i, j, k);
      for (int a = 0; a < m; ++a) t.C_hv(i, j, a) = t.T(i, j, n + a);
    }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) t.S_vv(a, b, c) = t.T(n + a, n + b, n + c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t.T_vhh(a, i, j) = t.T(n + a, j, i);
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i) t.T_vvh(a, b, i) = t.T(n + a, i, n + b);
  }
  return t;
}

RealTensor assemble_torsion(const TorsionPoint& t) {
  const int n = t.shape.n, m = t.shape.m, d = n + m;
  RealTensor T({d, d, d}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) T(i, j, k) = t.T_hh(i, j, k);
      for (int a = 0; a < m; ++a) {
        T(i, j, n + a) = t.C_hv(i, j, a);
        T(i, n + a, j) = -t.C_hv(i, j, a);
      }
    }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) T(n + a, n + b, n + c) = t.S_vv(a, b, c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T(n + a, j, i) = t.T_vhh(a, i, j);
    for (int b = 0; b < m; ++b)
      for (int i = 0; i < n; ++i) {
        T(n + a, i, n + b) = t.T_vvh(a, b, i);
        T(n + a, n + b, i) = -t.T_vvh(a, b, i);
      }
  }
  return T;
}

JetTensor curvature_jets(const GeometryJets& G, const JetTensor& Gam, const JetTensor& W) {
  const int d = G.shape.dim();
  const int K = Gam(0, 0, 0).order();
  if (K < 1) throw OrderError("curvature needs connection jets of order >= 1");
  const Jet zero(d, K - 1);
  // delta_c Gamma(a, b, e), truncated once.
  JetTensor dGam({d, d, d, d}, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e)
        for (int c = 0; c < d; ++c) dGam(a, b, e, c) = elongated(G, Gam(a, b, e), c);
  JetTensor Gt = truncate(Gam, K - 1), Wt = truncate(W, K - 1);
  JetTensor R({d, d, d, d}, zero);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int g = 0; g < d; ++g)
        for (int t = 0; t < d; ++t) {
          if (t == g) continue;
          if (t < g) {
            R(a, b, g, t) = -R(a, b, t, g);
            continue;
          }
          Jet s = dGam(a, b, g, t) - dGam(a, b, t, g);
          for (int f = 0; f < d; ++f) {
            s += Gt(f, b, g) * Gt(a, f, t);
            s -= Gt(f, b, t) * Gt(a, f, g);
            s += Gt(a, b, f) * Wt(f, g, t);
          }
          R(a, b, g, t) = s;
        }
  return R;
}

CurvaturePoint curvature_point(const RealTensor& R, BundleShape s) {
  const int n = s.n, m = s.m;
  CurvaturePoint c;
  c.shape = s;
  c.R = R;
  c.R_h = RealTensor({n, n, n, n}, 0.0);
  c.R_v = RealTensor({m, m, n, n}, 0.0);
  c.P_h = RealTensor({n, n, n, m}, 0.0);
  c.P_v = RealTensor({m, m, n, m}, 0.0);
  c.S_h = RealTensor({n, n, m, m}, 0.0);
  c.S_v = RealTensor({m, m, m, m}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) c.R_h(i, h, j, k) = R(i, h, j, k);
        for (int a = 0; a < m; ++a) c.P_h(i, h, j, a) = R(i, h, j, n + a);
      }
      for (int b = 0; b < m; ++b)
        for (int e = 0; e < m; ++e) c.S_h(i, h, b, e) = R(i, h, n + b, n + e);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) c.R_v(a, b, j, k) = R(n + a, n + b, j, k);
        for (int e = 0; e < m; ++e) c.P_v(a, b, j, e) = R(n + a, n + b, j, n + e);
      }
      for (int e = 0; e < m; ++e)
        for (int f = 0; f < m; ++f) c.S_v(a, b, e, f) = R(n + a, n + b, n + e, n + f);
    }
  return c;
}

CurvaturePoint curvature_families_direct(const GeometryJets& G, const ConnectionSelector& sel) {
  const int n = G.shape.n, m = G.shape.m, d = n + m;
  JetTensor Gam = connection_jets(G, sel);  // order K-1
  const int K1 = Gam(0, 0, 0).order();
  if (K1 < 1) throw OrderError("curvature needs geometry jets of order >= 2");
  JetTensor Om = n_curvature_jets(G);
  const Jet zero(d, K1 - 1);
  auto L = [&](int i, int j, int k) { return Gam(i, j, k).truncate(K1 - 1); };
  auto Lv = [&](int a, int b, int k) { return Gam(n + a, n + b, k).truncate(K1 - 1); };
  auto C = [&](int i, int j, int c) { return Gam(i, j, n + c).truncate(K1 - 1); };
  auto Cv = [&](int a, int b, int c) { return Gam(n + a, n + b, n + c).truncate(K1 - 1); };
  auto dL = [&](int i, int j, int k, int dir) { return elongated(G, Gam(i, j, k), dir); };
  // T^b_{ka} = d_a N_k^b - L^b_ak (assembled torsion component T(n+b, k, n+a)).
  auto Tbka = [&](int b, int k, int a) {
    return G.N(b, k).derivative(n + a).truncate(K1 - 1) - Lv(b, a, k);
  };

  RealTensor R({d, d, d, d}, 0.0);
  auto put = [&](int a, int b, int g, int t, const Jet& v) {
    R(a, b, g, t) = v.value();
    R(a, b, t, g) = -v.value();
  };
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Jet s = dL(i, h, j, k) - dL(i, h, k, j);
          for (int l = 0; l < n; ++l) s += L(l, h, j) * L(i, l, k) - L(l, h, k) * L(i, l, j);
          for (int a = 0; a < m; ++a) s += C(i, h, a) * Om(a, j, k).truncate(K1 - 1);
          put(i, h, j, k, s);
        }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Jet s = dL(n + a, n + b, j, k) - dL(n + a, n + b, k, j);
          for (int c = 0; c < m; ++c) s += Lv(c, b, j) * Lv(a, c, k) - Lv(c, b, k) * Lv(a, c, j);
          for (int c = 0; c < m; ++c) s += Cv(a, b, c) * Om(c, j, k).truncate(K1 - 1);
          put(n + a, n + b, j, k, s);
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) {
          Jet s = dL(i, j, k, n + a);
          for (int b = 0; b < m; ++b) s += C(i, j, b) * Tbka(b, k, a);
          Jet paren = dL(i, j, n + a, k);
          for (int l = 0; l < n; ++l) paren += L(i, l, k) * C(l, j, a) - L(l, j, k) * C(i, l, a);
          for (int c = 0; c < m; ++c) paren -= Lv(c, a, k) * C(i, j, c);
          put(i, j, k, n + a, s - paren);
        }
  for (int c = 0; c < m; ++c)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) {
          Jet s = dL(n + c, n + b, k, n + a);
          for (int e = 0; e < m; ++e) s += Cv(c, b, e) * Tbka(e, k, a);
          Jet paren = dL(n + c, n + b, n + a, k);
          for (int e = 0; e < m; ++e)
            paren += Lv(c, e, k) * Cv(e, b, a) - Lv(e, b, k) * Cv(c, e, a) - Lv(e, a, k) * Cv(c, b, e);
          put(n + c, n + b, k, n + a, s - paren);
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < m; ++b)
        for (int c = b + 1; c < m; ++c) {
          Jet s = Gam(i, j, n + b).derivative(n + c) - Gam(i, j, n + c).derivative(n + b);
          for (int h = 0; h < n; ++h) s += C(h, j, b) * C(i, h, c) - C(h, j, c) * C(i, h, b);
          put(i, j, n + b, n + c, s);
        }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int e = c + 1; e < m; ++e) {
          Jet s = Gam(n + a, n + b, n + c).derivative(n + e) -
                  Gam(n + a, n + b, n + e).derivative(n + c);
          for (int f = 0; f < m; ++f) s += Cv(f, b, c) * Cv(a, f, e) - Cv(f, b, e) * Cv(a, f, c);
          put(n + a, n + b, n + c, n + e, s);
        }
  return curvature_point(R, G.shape);
}

JetTensor ricci_jets(const JetTensor& R) {
  const int d = R.dim(0);
  JetTensor Ric({d, d}, Jet(R(0, 0, 0, 0).vars(), R(0, 0, 0, 0).order()));
  for (int b = 0; b < d; ++b)
    for (int g = 0; g < d; ++g)
      for (int a = 0; a < d; ++a) Ric(b, g) += R(a, b, g, a);
  return Ric;
}

Jet scalar_jet(const JetTensor& Ric, const JetTensor& ginv, const JetTensor& hinv, BundleShape s) {
  const int n = s.n, m = s.m;
  Jet r(Ric(0, 0).vars(), Ric(0, 0).order());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r += ginv(i, j) * Ric(i, j);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) r += hinv(a, b) * Ric(n + a, n + b);
  return r;
}

RicciPoint ricci_scalar(const CurvaturePoint& c, const GeometryJets& G) {
  const int n = c.shape.n, m = c.shape.m;
  const RealTensor& R = c.R;
  RicciPoint r;
  r.R_ij = RealTensor({n, n}, 0.0);
  r.P2 = RealTensor({n, m}, 0.0);
  r.P1 = RealTensor({m, n}, 0.0);
  r.S_ab = RealTensor({m, m}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) r.R_ij(i, j) += R(k, i, j, k);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a)
      for (int k = 0; k < n; ++k) r.P2(i, a) += R(k, i, k, n + a);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b) r.P1(a, i) += R(n + b, n + a, i, n + b);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int e = 0; e < m; ++e) r.S_ab(a, b) += R(n + e, n + a, n + b, n + e);
  Eigen::MatrixXd gi = value_matrix(G.g).inverse(), hi = value_matrix(G.h).inverse();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.Rhat += gi(i, j) * r.R_ij(i, j);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) r.S += hi(a, b) * r.S_ab(a, b);
  r.total = r.Rhat + r.S;
  return r;
}

TorsionPoint d_torsion(const GeometrySource& src, const ConnectionSelector& sel,
                       std::span<const double> u) {
  GeometryJets G = src.jets(u, 1);
  return torsion_from(values(connection_jets(G, sel)), values(anholonomy_jets(G)), G.shape);
}

CurvaturePoint d_curvature(const GeometrySource& src, const ConnectionSelector& sel,
                           std::span<const double> u) {
  GeometryJets G = src.jets(u, 2);
  JetTensor R = curvature_jets(G, connection_jets(G, sel), anholonomy_jets(G));
  return curvature_point(values(R), G.shape);
}

EinsteinSources einstein_blocks(const RicciPoint& r, const GeometryJets& G) {
  const int n = G.shape.n, m = G.shape.m;
  EinsteinSources e;
  e.ij = RealTensor({n, n}, 0.0);
  e.ab = RealTensor({m, m}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e.ij(i, j) = r.R_ij(i, j) - 0.5 * r.total * G.g(i, j).value();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) e.ab(a, b) = r.S_ab(a, b) - 0.5 * r.total * G.h(a, b).value();
  e.ai = r.P1;
  e.ia = r.P2;
  return e;
}

EinsteinReport einstein_residual(const RicciPoint& r, const GeometryJets& G, double kappa,
                                 const EinsteinSources& src) {
  EinsteinSources lhs = einstein_blocks(r, G);
  auto sub = [kappa](RealTensor a, const RealTensor& s) {
    if (s.size() == 0) return a;
    if (s.size() != a.size()) throw ConfigError("source block has the wrong shape");
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] -= kappa * s.data()[i];
    return a;
  };
  EinsteinReport rep;
  rep.hh = sub(lhs.ij, src.ij);
  rep.vv = sub(lhs.ab, src.ab);
  rep.vh = sub(lhs.ai, src.ai);
  rep.hv = sub(lhs.ia, src.ia);
  rep.max_abs = std::max({max_abs(rep.hh), max_abs(rep.vv), max_abs(rep.vh), max_abs(rep.hv)});
  return rep;
}

EinsteinReport einstein_residual(const GeometrySource& src, const ConnectionSelector& sel,
                                 double kappa, const EinsteinSources& sources,
                                 std::span<const double> u) {
  GeometryJets G = src.jets(u, 2);
  JetTensor R = curvature_jets(G, connection_jets(G, sel), anholonomy_jets(G));
  CurvaturePoint c = curvature_point(values(R), G.shape);
  return einstein_residual(ricci_scalar(c, G), G, kappa, sources);
}

}  // namespace dgeom
