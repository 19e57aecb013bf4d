#include "dgeom/connection.hpp"

#include "dgeom/jet_linalg.hpp"

namespace dgeom {

const char* to_string(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::Canonical: return "canonical";
    case ConnectionKind::LeviCivita: return "levi-civita";
    case ConnectionKind::User: return "user";
  }
  return "?";
}

namespace {

JetTensor canonical_jets(const GeometryJets& G, bool levi_civita) {
  const int n = G.shape.n, m = G.shape.m, d = n + m;
  const int K = G.order;
  if (K < 1) throw OrderError("connection needs geometry jets of order >= 1");
  JetTensor ginv = inverse(G.g, "horizontal metric block g");
  JetTensor hinv = inverse(G.h, "vertical metric block h");
  const Jet zero(d, K - 1);
  JetTensor Gam({d, d, d}, zero);

  // delta_k g_ij and d_c g_ij, d_c h_ab, delta_k h_ab.
  JetTensor dg({n, n, d}, zero), dh({m, m, d}, zero);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < d; ++a) dg(i, j, a) = elongated(G, G.g(i, j), a);
  for (int b = 0; b < m; ++b)
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < d; ++a) dh(b, c, a) = elongated(G, G.h(b, c), a);
  // dN(a, b, k) = d_{y^b} N_k^a
  JetTensor dN({m, m, n}, zero);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k) dN(a, b, k) = G.N(a, k).derivative(n + b);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s = zero;
        for (int l = 0; l < n; ++l)
          s += ginv(i, l) * (dg(l, j, k) + dg(l, k, j) - dg(j, k, l));
        Gam(i, j, k) = s * 0.5;
      }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k) {
        Jet s = zero;
        for (int c = 0; c < m; ++c) {
          Jet t = dh(b, c, k);
          for (int e = 0; e < m; ++e) t -= G.h(e, c) * dN(e, b, k) + G.h(e, b) * dN(e, c, k);
          s += hinv(a, c) * t;
        }
        Gam(n + a, n + b, k) = dN(a, b, k) + s * 0.5;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int c = 0; c < m; ++c) {
        Jet s = zero;
        for (int k = 0; k < n; ++k) s += ginv(i, k) * dg(j, k, n + c);
        Gam(i, j, n + c) = s * 0.5;
      }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        Jet s = zero;
        for (int e = 0; e < m; ++e)
          s += hinv(a, e) * (dh(e, b, n + c) + dh(e, c, n + b) - dh(b, c, n + e));
        Gam(n + a, n + b, n + c) = s * 0.5;
      }
  if (levi_civita) {
    JetTensor Om = n_curvature_jets(G);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int c = 0; c < m; ++c) {
          Jet s = zero;
          for (int k = 0; k < n; ++k)
            for (int a = 0; a < m; ++a) s += ginv(i, k) * (Om(a, j, k) * G.h(c, a));
          Gam(i, j, n + c) += s * 0.5;
        }
  }
  return Gam;
}

JetTensor user_jets(const GeometryJets& G, const UserConnection& U) {
  const int n = G.shape.n, m = G.shape.m, d = n + m;
  if (!(U.shape == G.shape)) throw ConfigError("user connection shape differs from the bundle");
  const int K = G.order - 1;
  JetTensor Gam({d, d, d}, Jet(d, K));
  auto fill = [&](const std::vector<ScalarField>& f, int r0, int r1, int c0, int c1, int k0,
                  int k1) {
    const int nr = r1 - r0, nc = c1 - c0, nk = k1 - k0;
    if (static_cast<int>(f.size()) != nr * nc * nk)
      throw ConfigError("user connection family has the wrong number of entries");
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c)
        for (int k = 0; k < nk; ++k)
          Gam(r0 + r, c0 + c, k0 + k) = f[(r * nc + c) * nk + k].eval_jet(G.u, K);
  };
  fill(U.L_hh, 0, n, 0, n, 0, n);
  fill(U.L_vv_h, n, d, n, d, 0, n);
  fill(U.C_hh_v, 0, n, 0, n, n, d);
  fill(U.C_vv_v, n, d, n, d, n, d);
  return Gam;
}

}  // namespace

JetTensor connection_jets(const GeometryJets& G, const ConnectionSelector& sel) {
  switch (sel.kind) {
    case ConnectionKind::Canonical: return canonical_jets(G, false);
    case ConnectionKind::LeviCivita: return canonical_jets(G, true);
    case ConnectionKind::User:
      if (!sel.user) throw ConfigError("user connection selected without coefficient fields");
      return user_jets(G, *sel.user);
  }
  throw ConfigError("unknown connection kind");
}

DConnectionPoint split_families(const RealTensor& Gam, BundleShape s) {
  const int n = s.n, m = s.m;
  DConnectionPoint c;
  c.shape = s;
  c.L_hh = RealTensor({n, n, n}, 0.0);
  c.L_vv_h = RealTensor({m, m, n}, 0.0);
  c.C_hh_v = RealTensor({n, n, m}, 0.0);
  c.C_vv_v = RealTensor({m, m, m}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) c.L_hh(i, j, k) = Gam(i, j, k);
      for (int a = 0; a < m; ++a) c.C_hh_v(i, j, a) = Gam(i, j, n + a);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k) c.L_vv_h(a, b, k) = Gam(n + a, n + b, k);
      for (int e = 0; e < m; ++e) c.C_vv_v(a, b, e) = Gam(n + a, n + b, n + e);
    }
  return c;
}

RealTensor assemble(const DConnectionPoint& c) {
  const int n = c.shape.n, m = c.shape.m, d = n + m;
  RealTensor Gam({d, d, d}, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) Gam(i, j, k) = c.L_hh(i, j, k);
      for (int a = 0; a < m; ++a) Gam(i, j, n + a) = c.C_hh_v(i, j, a);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k) Gam(n + a, n + b, k) = c.L_vv_h(a, b, k);
      for (int e = 0; e < m; ++e) Gam(n + a, n + b, n + e) = c.C_vv_v(a, b, e);
    }
  return Gam;
}

DConnectionPoint canonical_dconnection(const GeometrySource& src, std::span<const double> u) {
  GeometryJets G = src.jets(u, 1);
  return split_families(values(connection_jets(G, ConnectionSelector::canonical())), G.shape);
}

DConnectionPoint levi_civita_anholonomic(const GeometrySource& src, std::span<const double> u) {
  GeometryJets G = src.jets(u, 1);
  return split_families(values(connection_jets(G, ConnectionSelector::levi_civita())), G.shape);
}

NLinearPoint n_linear_connection(const NConnectionField& N, std::span<const double> u) {
  const int n = N.shape.n, m = N.shape.m;
  NLinearPoint p;
  p.Gamma_N = RealTensor({m, m, n}, 0.0);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      Jet j = N.at(a, i).eval_jet(u, 1);
      for (int b = 0; b < m; ++b) p.Gamma_N(a, b, i) = j.d1(n + b);
    }
  return p;
}

double metric_compatibility_residual(const RealTensor& Gam, const GeometryJets& G) {
  const int n = G.shape.n, m = G.shape.m, d = n + m;
  if (Gam.dim(0) != d) throw ConfigError("connection and metric shapes differ");
  // Adapted-basis metric diag(g, h) as values and elongated derivatives.
  Eigen::MatrixXd Gv = Eigen::MatrixXd::Zero(d, d);
  std::vector<Eigen::MatrixXd> dG(d, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Gv(i, j) = G.g(i, j).value();
      for (int c = 0; c < d; ++c) dG[c](i, j) = elongated(G, G.g(i, j), c).value();
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Gv(n + a, n + b) = G.h(a, b).value();
      for (int c = 0; c < d; ++c) dG[c](n + a, n + b) = elongated(G, G.h(a, b), c).value();
    }
  double worst = 0.0;
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double r = dG[c](a, b);
        for (int t = 0; t < d; ++t) r -= Gam(t, a, c) * Gv(t, b) + Gam(t, b, c) * Gv(a, t);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

double metric_compatibility_residual(const DConnectionPoint& conn, const GeometrySource& src,
                                     std::span<const double> u) {
  return metric_compatibility_residual(assemble(conn), src.jets(u, 1));
}

}  // namespace dgeom
