#include "dgeom/verify.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "dgeom/catalog.hpp"
#include "dgeom/errors.hpp"
#include "dgeom/gauge_sw.hpp"
#include "dgeom/jet_linalg.hpp"
#include "dgeom/ncalg.hpp"
#include "dgeom/spectral.hpp"

namespace dgeom {

namespace {

class Recorder {
public:
  Recorder(std::vector<Check>& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

  void below(const std::string& name, double tol, const std::function<double()>& f) {
    add(name, tol, false, f);
  }
  void above(const std::string& name, double bound, const std::function<double()>& f) {
    add(name, bound, true, f);
  }

private:
  void add(const std::string& name, double tol, bool lower, const std::function<double()>& f) {
    Check c{suite_, name, std::numeric_limits<double>::quiet_NaN(), tol, lower, false, {}};
    try {
      c.value = f();
      c.pass = std::isfinite(c.value) && (lower ? c.value > tol : c.value <= tol);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    out_.push_back(std::move(c));
  }

  std::vector<Check>& out_;
  std::string suite_;
};

using Points = std::vector<std::vector<double>>;

Points points_for(const GeometrySource& src, int count, std::uint64_t seed) {
  SampleSpec s;
  s.count = count;
  s.seed = seed;
  return sample_points(src.shape(), s);
}

double max_over(const Points& pts, const std::function<double(const std::vector<double>&)>& f) {
  double w = 0.0;
  for (const auto& u : pts) w = std::max(w, f(u));
  return w;
}

double matrix_max(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

const FieldGeometry& as_fields(const GeometrySource& src) {
  auto* f = dynamic_cast<const FieldGeometry*>(&src);
  if (!f) throw ConfigError("expected a field geometry");
  return *f;
}

// Textbook Christoffel symbols of a metric block whose coordinates are the
// variables off .. off+k-1; Gam(i, j, l) = Gamma^i_{jl}.
JetTensor christoffel(const JetTensor& g, int off) {
  const int k = g.dim(0);
  const Jet& g00 = g(0, 0);
  JetTensor gi = inverse(g, "metric");
  JetTensor dg({k, k, k}, Jet(g00.vars(), g00.order() - 1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) dg(i, j, l) = g(i, j).derivative(off + l);
  JetTensor G({k, k, k}, Jet(g00.vars(), g00.order() - 1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) {
        Jet s(g00.vars(), g00.order() - 1);
        for (int p = 0; p < k; ++p) s += gi(i, p) * (dg(p, j, l) + dg(p, l, j) - dg(j, l, p));
        G(i, j, l) = s * 0.5;
      }
  return G;
}

// Riemann R^i_{j kl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{kp} Gamma^p_{lj}
//                     - Gamma^i_{lp} Gamma^p_{kj}.
RealTensor riemann(const JetTensor& Gam, int off) {
  const int k = Gam.dim(0);
  RealTensor R({k, k, k, k}, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          double s = Gam(i, b, j).d1(off + a) - Gam(i, a, j).d1(off + b);
          for (int p = 0; p < k; ++p)
            s += Gam(i, a, p).value() * Gam(p, b, j).value() - Gam(i, b, p).value() * Gam(p, a, j).value();
          R(i, j, a, b) = s;
        }
  return R;
}

JetTensor metric_jets(const std::vector<std::vector<std::string>>& rows, BundleShape s,
                      std::span<const double> u, int order) {
  const int k = static_cast<int>(rows.size());
  JetTensor g({k, k}, Jet(s.dim(), order));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = parse_field(rows[i][j], s).eval_jet(u, order);
  return g;
}

// ---- bundle ------------------------------------------------------------------------

void bundle_suite(Recorder& r, const VerifyOptions& o) {
  auto an = builtin_geometry("anisotropic");
  auto pg = builtin_geometry("pure_gauge");
  const Points pts = points_for(*an, 50, o.seed);

  r.below("frame duality", 1e-12, [&] {
    double w = 0.0;
    for (const auto* src : {an.get(), pg.get()}) {
      const auto& N = as_fields(*src).nconnection();
      w = std::max(w, max_over(pts, [&](const auto& u) {
        auto f = adapted_frame(N, u);
        const long d = f.e.rows();
        return (f.e * f.e_inv - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
      }));
    }
    return w;
  });

  r.below("commutator identity", 1e-8, [&] {
    const BundleShape sh = an->shape();
    const int d = sh.dim();
    auto fields = random_test_fields(sh, 10, o.seed + 1);
    return max_over(pts, [&](const auto& u) {
      GeometryJets G = an->jets(u, 2);
      RealTensor W = values(anholonomy_jets(G));
      double w = 0.0;
      for (const auto& f : fields) {
        Jet F = f.eval_jet(u, 2);
        std::vector<Jet> df;
        for (int a = 0; a < d; ++a) df.push_back(elongated(G, F, a));
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            double s = elongated(G, df[b], a).value() - elongated(G, df[a], b).value();
            for (int c = 0; c < d; ++c) s -= W(c, a, b) * df[c].value();
            w = std::max(w, std::abs(s));
          }
      }
      return w;
    });
  });

  r.below("torsion/omega cross-check", 1e-10, [&] {
    const int n = an->shape().n, m = an->shape().m;
    return max_over(pts, [&](const auto& u) {
      GeometryJets G = an->jets(u, 1);
      RealTensor Om = o.omega(G);
      RealTensor W = values(anholonomy_jets(G));
      TorsionPoint T = d_torsion(*an, ConnectionSelector::canonical(), u);
      double w = 0.0;
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            w = std::max(w, std::abs(W(n + a, i, j) - Om(a, i, j)));
            w = std::max(w, std::abs(T.T_vhh(a, i, j) + Om(a, i, j)));
          }
      return w;
    });
  });

  r.below("off-diagonal metric determinant", 1e-9, [&] {
    const auto& F = as_fields(*an);
    return max_over(pts, [&](const auto& u) {
      Eigen::MatrixXd M = offdiagonal_metric(F.metric(), F.nconnection(), u);
      GeometryJets G = an->jets(u, 0);
      const double want = value_matrix(G.g).determinant() * value_matrix(G.h).determinant();
      const double sym = (M - M.transpose()).cwiseAbs().maxCoeff();
      return std::max(sym, std::abs(M.determinant() - want) / std::abs(want));
    });
  });
}

// ---- connection --------------------------------------------------------------------

void connection_suite(Recorder& r, const VerifyOptions& o) {
  const std::vector<std::string> metrics = {"flat", "sphere2xflat", "anisotropic", "finsler:randers"};
  for (const char* kind : {"canonical", "levi-civita"}) {
    const auto sel = std::string(kind) == "canonical" ? ConnectionSelector::canonical()
                                                      : ConnectionSelector::levi_civita();
    r.below(std::string("metricity ") + kind, 1e-9, [&] {
      double w = 0.0;
      for (const auto& id : metrics) {
        auto src = builtin_geometry(id);
        w = std::max(w, max_over(points_for(*src, 100, o.seed), [&](const auto& u) {
          GeometryJets G = src->jets(u, 1);
          return metric_compatibility_residual(values(connection_jets(G, sel)), G);
        }));
      }
      return w;
    });
  }

  r.below("pure-gauge coincidence", 1e-10, [&] {
    auto src = builtin_geometry("pure_gauge");
    return max_over(points_for(*src, 50, o.seed), [&](const auto& u) {
      return max_abs_diff(assemble(canonical_dconnection(*src, u)),
                          assemble(levi_civita_anholonomic(*src, u)));
    });
  });

  r.below("christoffel reduction", 1e-10, [&] {
    auto src = builtin_geometry("blockdiag");
    const auto& M = as_fields(*src).metric();
    const BundleShape sh = src->shape();
    const int n = sh.n, m = sh.m;
    return max_over(points_for(*src, 50, o.seed), [&](const auto& u) {
      JetTensor g({n, n}, Jet(sh.dim(), 1)), h({m, m}, Jet(sh.dim(), 1));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = M.g_at(i, j).eval_jet(u, 1);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) h(a, b) = M.h_at(a, b).eval_jet(u, 1);
      RealTensor cg = values(christoffel(g, 0)), ch = values(christoffel(h, n));
      double w = 0.0;
      for (const auto& c : {canonical_dconnection(*src, u), levi_civita_anholonomic(*src, u)}) {
        w = std::max({w, max_abs_diff(c.L_hh, cg), max_abs_diff(c.C_vv_v, ch), max_abs(c.L_vv_h),
                      max_abs(c.C_hh_v)});
      }
      return w;
    });
  });
}

// ---- curvature ---------------------------------------------------------------------

// Curvature from central differences of the connection values.
RealTensor fd_curvature(const GeometrySource& src, const ConnectionSelector& sel,
                        std::span<const double> u, double step) {
  const BundleShape sh = src.shape();
  const int n = sh.n, d = sh.dim();
  GeometryJets G = src.jets(u, 1);
  RealTensor Gam = values(connection_jets(G, sel));
  RealTensor W = values(anholonomy_jets(G));
  std::vector<RealTensor> dG;  // partial derivatives along coordinate b
  for (int b = 0; b < d; ++b) {
    std::vector<double> up(u.begin(), u.end()), um(u.begin(), u.end());
    up[b] += step;
    um[b] -= step;
    RealTensor gp = values(connection_jets(src.jets(up, 1), sel));
    RealTensor gm = values(connection_jets(src.jets(um, 1), sel));
    RealTensor t({d, d, d}, 0.0);
    for (std::size_t k = 0; k < t.size(); ++k) t(static_cast<int>(k)) = (gp(static_cast<int>(k)) - gm(static_cast<int>(k))) / (2 * step);
    dG.push_back(std::move(t));
  }
  auto delta = [&](int tau, int a, int b, int c) {
    double s = dG[tau](a, b, c);
    if (tau < n)
      for (int e = 0; e < sh.m; ++e) s -= G.N(e, tau).value() * dG[n + e](a, b, c);
    return s;
  };
  RealTensor R({d, d, d, d}, 0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int g = 0; g < d; ++g)
        for (int t = 0; t < d; ++t) {
          double s = delta(t, a, b, g) - delta(g, a, b, t);
          for (int f = 0; f < d; ++f)
            s += Gam(f, b, g) * Gam(a, f, t) - Gam(f, b, t) * Gam(a, f, g) + Gam(a, b, f) * W(f, g, t);
          R(a, b, g, t) = s;
        }
  return R;
}

void curvature_suite(Recorder& r, const VerifyOptions& o) {
  auto an = builtin_geometry("anisotropic");
  const Points pts = points_for(*an, 20, o.seed);

  r.below("torsion reassembly", 1e-12, [&] {
    return max_over(pts, [&](const auto& u) {
      TorsionPoint T = d_torsion(*an, ConnectionSelector::canonical(), u);
      return max_abs_diff(assemble_torsion(T), T.T);
    });
  });

  r.below("levi-civita torsion, N = 0", 1e-10, [&] {
    auto src = builtin_geometry("blockdiag");
    return max_over(points_for(*src, 20, o.seed), [&](const auto& u) {
      return max_abs(d_torsion(*src, ConnectionSelector::levi_civita(), u).T);
    });
  });

  r.below("ricci mixed blocks, N = 0", 1e-10, [&] {
    auto src = builtin_geometry("blockdiag");
    return max_over(points_for(*src, 20, o.seed), [&](const auto& u) {
      auto c = d_curvature(*src, ConnectionSelector::levi_civita(), u);
      RicciPoint R = ricci_scalar(c, src->jets(u, 2));
      return std::max(max_abs(R.P1), max_abs(R.P2));
    });
  });

  r.above("ricci asymmetry", 1e-6, [&] {
    return max_over(pts, [&](const auto& u) {
      auto c = d_curvature(*an, ConnectionSelector::canonical(), u);
      RicciPoint R = ricci_scalar(c, an->jets(u, 2));
      double w = 0.0;
      for (int a = 0; a < R.P1.dim(0); ++a)
        for (int i = 0; i < R.P1.dim(1); ++i) w = std::max(w, std::abs(R.P1(a, i) - R.P2(i, a)));
      return w;
    });
  });

  r.below("scalar contraction", 1e-10, [&] {
    const int n = an->shape().n;
    return max_over(pts, [&](const auto& u) {
      auto c = d_curvature(*an, ConnectionSelector::canonical(), u);
      GeometryJets G = an->jets(u, 2);
      RicciPoint R = ricci_scalar(c, G);
      Eigen::MatrixXd gi = value_matrix(G.g).inverse();
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) s += gi(i, j) * c.R_h(k, i, j, k);
      return std::abs(s - R.Rhat) / std::max(1.0, std::abs(s));
    });
  });

  r.below("families, direct vs assembled", 1e-10, [&] {
    return max_over(pts, [&](const auto& u) {
      auto a = d_curvature(*an, ConnectionSelector::canonical(), u);
      auto b = curvature_families_direct(an->jets(u, 2), ConnectionSelector::canonical());
      double w = 0.0;
      for (auto [x, y] : {std::pair{&a.R_h, &b.R_h}, {&a.R_v, &b.R_v}, {&a.P_h, &b.P_h},
                          {&a.P_v, &b.P_v}, {&a.S_h, &b.S_h}, {&a.S_v, &b.S_v}})
        w = std::max(w, max_abs_diff(*x, *y));
      return w / std::max(1.0, max_abs(a.R));
    });
  });

  r.below("jets vs finite differences", 1e-5, [&] {
    return max_over(Points(pts.begin(), pts.begin() + 5), [&](const auto& u) {
      auto c = d_curvature(*an, ConnectionSelector::canonical(), u);
      return max_abs_diff(c.R, fd_curvature(*an, ConnectionSelector::canonical(), u, 1e-4));
    });
  });

  r.below("sphere scalar 2/r^2", 1e-8, [&] {
    double w = 0.0;
    for (double rad : {1.0, 1.7}) {
      auto src = builtin_geometry("sphere2xflat:" + std::to_string(rad));
      w = std::max(w, max_over(points_for(*src, 20, o.seed), [&](const auto& u) {
        auto c = d_curvature(*src, ConnectionSelector::canonical(), u);
        return std::abs(ricci_scalar(c, src->jets(u, 2)).Rhat - 2.0 / (rad * rad));
      }));
    }
    return w;
  });

  r.below("flat curvature", 1e-12, [&] {
    auto src = builtin_geometry("flat");
    return max_over(points_for(*src, 20, o.seed), [&](const auto& u) {
      return max_abs(d_curvature(*src, ConnectionSelector::canonical(), u).R);
    });
  });
}

// ---- finsler -----------------------------------------------------------------------

const std::vector<std::vector<std::string>> kRiemannRows = {
    {"1+0.2*x1^2", "0.1*x1*x2"}, {"0.1*x1*x2", "1+0.3*x2^2+0.1*sin(x1)"}};

std::vector<FinslerFunction> finsler_examples() {
  std::string spec = "riemann:";
  for (std::size_t i = 0; i < kRiemannRows.size(); ++i) {
    if (i) spec += ";";
    for (std::size_t j = 0; j < kRiemannRows[i].size(); ++j) spec += (j ? "," : "") + kRiemannRows[i][j];
  }
  return {FinslerFunction::builtin("euclidean", 2), FinslerFunction::builtin(spec, 2),
          FinslerFunction::builtin("riemann", 3), FinslerFunction::builtin("quartic", 2),
          FinslerFunction::builtin("randers", 2), FinslerFunction::builtin("randers", 3)};
}

std::vector<double> scale_y(std::span<const double> u, int n, double s) {
  std::vector<double> v(u.begin(), u.end());
  for (int i = n; i < static_cast<int>(v.size()); ++i) v[i] *= s;
  return v;
}

void finsler_suite(Recorder& r, const VerifyOptions& o) {
  const auto F = finsler_examples();
  auto each = [&](const std::function<double(const FinslerFunction&, const std::vector<double>&)>& f) {
    double w = 0.0;
    for (const auto& fn : F) {
      SampleSpec s;
      s.count = 20;
      s.seed = o.seed;
      for (const auto& u : sample_points(fn.shape(), s)) w = std::max(w, f(fn, u));
    }
    return w;
  };

  r.below("F 1-homogeneity", 1e-9, [&] {
    return each([](const FinslerFunction& f, const std::vector<double>& u) { return homogeneity_residual(f, u); });
  });
  r.below("metric 0-homogeneity", 1e-9, [&] {
    return each([](const FinslerFunction& f, const std::vector<double>& u) {
      Eigen::MatrixXd g = finsler_metric(f, u).g;
      double w = 0.0;
      for (double s : {0.5, 2.0, 3.0})
        w = std::max(w, (finsler_metric(f, scale_y(u, f.n(), s)).g - g).cwiseAbs().maxCoeff());
      return w;
    });
  });
  r.below("cartan 1-homogeneity", 1e-9, [&] {
    return each([](const FinslerFunction& f, const std::vector<double>& u) {
      Eigen::MatrixXd N = cartan_nconnection(f, u);
      double w = 0.0;
      for (double s : {0.5, 2.0, 3.0})
        w = std::max(w, (cartan_nconnection(f, scale_y(u, f.n(), s)) - s * N).cwiseAbs().maxCoeff());
      return w / std::max(1.0, N.cwiseAbs().maxCoeff());
    });
  });
  r.below("kahler closure", 1e-7, [&] {
    return each([](const FinslerFunction& f, const std::vector<double>& u) { return kahler_form_closure(f, u); });
  });

  const FinslerFunction& rf = F[1];
  const BundleShape sh = rf.shape();
  const int n = sh.n;
  SampleSpec s;
  s.count = 20;
  s.seed = o.seed;
  const Points pts = sample_points(sh, s);
  r.below("riemannian reduction, N", 1e-8, [&] {
    return max_over(pts, [&](const auto& u) {
      RealTensor G = values(christoffel(metric_jets(kRiemannRows, sh, u, 1), 0));
      Eigen::MatrixXd N = cartan_nconnection(rf, u);
      double w = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double want = 0.0;
          for (int k = 0; k < n; ++k) want += G(i, j, k) * u[n + k];
          w = std::max(w, std::abs(N(i, j) - want));
        }
      return w;
    });
  });
  r.below("riemannian reduction, curvature", 1e-8, [&] {
    FinslerGeometry geo(rf);
    return max_over(pts, [&](const auto& u) {
      RealTensor Rc = riemann(christoffel(metric_jets(kRiemannRows, sh, u, 2), 0), 0);
      RealTensor R = d_curvature(geo, ConnectionSelector::canonical(), u).R;
      double w = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) w = std::max(w, std::abs(R(i, j, k, l) - Rc(i, j, l, k)));
      return w;
    });
  });
}

// ---- spectral ----------------------------------------------------------------------

void spectral_suite(Recorder& r, const VerifyOptions& o) {
  const std::vector<std::string> ids = {"flat:1,1", "flat:2,1", "flat:3,1", "flat:3,2",
                                        "flat:3,3", "sphere2xflat", "sphere2xflat:1,3",
                                        "anisotropic", "pure_gauge", "finsler:randers"};
  r.below("clifford relation", 1e-12, [&] {
    double w = 0.0;
    for (const auto& id : ids) {
      auto src = builtin_geometry(id);
      const BundleShape sh = src->shape();
      const GammaSet flat = gammas(sh.dim());
      w = std::max(w, max_over(points_for(*src, 10, o.seed), [&](const auto& u) {
        GeometryJets G = src->jets(u, 0);
        Eigen::MatrixXd g = value_matrix(G.g), h = value_matrix(G.h);
        auto curved = gamma_frame(flat, vielbein(g, h));
        Eigen::MatrixXd Gi = Eigen::MatrixXd::Zero(sh.dim(), sh.dim());
        Gi.topLeftCorner(sh.n, sh.n) = g.inverse();
        Gi.bottomRightCorner(sh.m, sh.m) = h.inverse();
        const long S = flat.spinor_dim();
        double v = 0.0;
        for (int a = 0; a < sh.dim(); ++a)
          for (int b = 0; b < sh.dim(); ++b) {
            Eigen::MatrixXcd ac = curved[a] * curved[b] + curved[b] * curved[a] -
                                  2.0 * Gi(a, b) * Eigen::MatrixXcd::Identity(S, S);
            v = std::max(v, matrix_max(ac));
          }
        return v;
      }));
    }
    return w;
  });

  auto an = builtin_geometry("anisotropic");
  const Points pts = points_for(*an, 10, o.seed);
  r.below("spin connection anti-hermitian", 1e-12, [&] {
    return max_over(pts, [&](const auto& u) {
      double w = 0.0;
      for (const auto& M : spin_connection(*an, ConnectionSelector::canonical(), u).matrices)
        w = std::max(w, matrix_max(M + M.adjoint()));
      return w;
    });
  });
  r.below("spin connection defining relation", 1e-9, [&] {
    return max_over(pts, [&](const auto& u) {
      GeometryJets G = an->jets(u, 2);
      return spin_defining_residual(spin_jets(G, ConnectionSelector::canonical()), G);
    });
  });
  r.below("gamma covariance", 1e-9, [&] {
    return max_over(pts, [&](const auto& u) {
      GeometryJets G = an->jets(u, 2);
      return gamma_covariance_residual(spin_jets(G, ConnectionSelector::canonical()), G);
    });
  });

  r.below("flat lichnerowicz", 1e-6, [&] {
    auto src = builtin_geometry("flat");
    const int d = src->shape().dim();
    const int S = gammas(d).spinor_dim();
    auto re = random_test_fields(src->shape(), 5 * S, o.seed + 2);
    auto im = random_test_fields(src->shape(), 5 * S, o.seed + 3);
    return max_over(points_for(*src, 5, o.seed), [&](const auto& u) {
      GeometryJets G = src->jets(u, 3);
      SpinJets sj = spin_jets(G, ConnectionSelector::canonical());
      double w = 0.0;
      for (int k = 0; k < 5; ++k) {
        SpinorField psi;
        psi.re.assign(re.begin() + k * S, re.begin() + (k + 1) * S);
        psi.im.assign(im.begin() + k * S, im.begin() + (k + 1) * S);
        SpinorJet p = psi.eval_jet(u, 2);
        SpinorJet DD = dirac_jets(dirac_jets(p, G, sj), G, sj);
        for (int s = 0; s < S; ++s) {
          cdouble lap = 0.0;
          for (int a = 0; a < d; ++a) lap += p[s].derivative(a).derivative(a).value();
          w = std::max(w, std::abs(DD[s].value() - lap));
        }
      }
      return w;
    });
  });

  r.below("densities independent of vielbein", 1e-9, [&] {
    return max_over(pts, [&](const auto& u) {
      auto a = seeley_densities(*an, ConnectionSelector::canonical(), 1.3, u, VielbeinKind::Cholesky);
      auto b = seeley_densities(*an, ConnectionSelector::canonical(), 1.3, u, VielbeinKind::Symmetric);
      return std::max({std::abs(a.a0 - b.a0), std::abs(a.a2 - b.a2),
                       std::abs(a.a4 - b.a4) / std::max(1.0, std::abs(a.a4))});
    });
  });

  r.below("cutoff moments", 0.0, [] {
    CutoffMoments m = cutoff_moments(0.0, 1.0);
    return std::max(std::abs(m.f0 - 0.5), std::abs(m.f2 - 1.0));
  });

  auto sphere = builtin_geometry("sphere2xflat");
  const Points sp = points_for(*sphere, 5, o.seed);
  r.below("lambda^4 cancellation", 0.0, [&] {
    std::vector<QuadraturePoint> grid;
    for (const auto& u : sp) grid.push_back({u, 0.2});
    return std::abs(spectral_action(*sphere, ConnectionSelector::canonical(), 2.0, 0.25, 0.5, grid).lambda4);
  });

  r.below("sphere a2 density", 1e-9, [&] {
    const double Lambda = 1.7, pi = std::acos(-1.0);
    const int d = sphere->shape().dim();
    const double trI = gammas(d).spinor_dim();
    return max_over(sp, [&](const auto& u) {
      auto D = seeley_densities(*sphere, ConnectionSelector::canonical(), Lambda, u);
      const double want = Lambda * Lambda * std::pow(4 * pi, -d / 2.0) * (2.0 / 12.0) * trI;
      return std::abs(D.a2 - want);
    });
  });

  r.below("a2 scaling with radius", 1e-8, [&] {
    auto big = builtin_geometry("sphere2xflat:2");
    return max_over(sp, [&](const auto& u) {
      auto a = seeley_densities(*sphere, ConnectionSelector::canonical(), 1.0, u);
      auto b = seeley_densities(*big, ConnectionSelector::canonical(), 1.0, u);
      return std::abs(b.a2 - 0.25 * a.a2);
    });
  });
}

// ---- ncalg -------------------------------------------------------------------------

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

void ncalg_suite(Recorder& r, const VerifyOptions& o) {
  std::mt19937_64 rng(o.seed);
  const ThetaMatrix th = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);
  const MoyalProduct moyal{th};

  std::vector<std::array<Poly, 3>> triples;
  for (int k = 0; k < 50; ++k)
    triples.push_back({random_poly(rng, 4, 4, 5), random_poly(rng, 4, 4, 5), random_poly(rng, 4, 4, 5)});

  r.below("moyal associativity", 1e-12, [&] {
    double w = 0.0;
    for (const auto& [f, g, h] : triples)
      w = std::max(w, max_abs_diff(star(star(f, g, moyal), h, moyal), star(f, star(g, h, moyal), moyal)));
    return w;
  });
  r.below("moyal coordinate commutators", 1e-15, [&] {
    double w = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Poly c = star_commutator(Poly::var(4, i), Poly::var(4, j), moyal);
        w = std::max(w, max_abs_diff(c, Poly::constant(4, cdouble(0.0, th.theta(i, j)))));
      }
    return w;
  });
  r.below("moyal degree bound", 0.0, [&] {
    double excess = 0.0;
    for (const auto& [f, g, h] : triples) {
      (void)h;
      excess = std::max(excess, double(star(f, g, moyal).degree() - f.degree() - g.degree()));
    }
    return excess;
  });
  r.below("moyal conjugation", 1e-14, [&] {
    const MoyalProduct neg{ThetaMatrix::from_matrix(-th.theta)};
    double w = 0.0;
    for (const auto& [f, g, h] : triples) {
      (void)h;
      Poly lhs = star(f, g, moyal).conj();
      w = std::max(w, max_abs_diff(lhs, star(f.conj(), g.conj(), neg)));
      w = std::max(w, max_abs_diff(lhs, star(g.conj(), f.conj(), moyal)));
    }
    return w;
  });

  r.below("lie order-1 commutator", 1e-15, [&] {
    const LieStructure L = LieStructure::su2();
    double w = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Poly want(3);
        for (int k = 0; k < 3; ++k) want += Poly::var(3, k, cdouble(0.0, L.at(i, j, k)));
        w = std::max(w, max_abs_diff(star_commutator(Poly::var(3, i), Poly::var(3, j), LieProduct{L, 1}), want));
      }
    return w;
  });
  r.below("lie vs moyal, central extension", 1e-12, [&] {
    const LieProduct lie{LieStructure::heisenberg(th), 2};
    double w = 0.0;
    for (int k = 0; k < 20; ++k) {
      Poly f = random_poly(rng, 4, 3, 4), g = random_poly(rng, 4, 3, 4);
      // z = 1: evaluate the central variable away.
      Poly l = star(f.widen(5), g.widen(5), lie), set(4);
      for (const auto& [e, c] : l.terms()) set.add(Exponent(e.begin(), e.begin() + 4), c);
      // t(s) = f *_{s theta} g - fg = a s + b s^2 + c s^3 for degree <= 3;
      // solve from s = 1, 1/2, -1/2 and keep a + b.
      Poly m = f * g;
      auto t = [&](double s) {
        return star(f, g, MoyalProduct{ThetaMatrix::from_matrix(s * th.theta)}) - m;
      };
      Poly t1 = t(1.0), tp = t(0.5), tm = t(-0.5);
      Poly b = (tp + tm) * cdouble(2.0);
      Poly a = (tp - tm) * cdouble(4.0 / 3.0) - (t1 - b) * cdouble(1.0 / 3.0);
      w = std::max(w, max_abs_diff(set, m + a + b));
    }
    return w;
  });

  const cdouble q(0.8, 0.35);
  std::uniform_int_distribution<int> ex(0, 3);
  auto mono = [&] { return Poly::monomial({ex(rng), ex(rng)}, 1.0); };
  r.below("quantum plane associativity", 1e-12, [&] {
    double w = 0.0;
    for (auto ord : {QPlaneOrdering::Normal, QPlaneOrdering::Symmetric})
      for (int k = 0; k < 30; ++k) {
        Poly f = mono(), g = mono(), h = mono();
        const QPlaneProduct p{q, ord};
        w = std::max(w, max_abs_diff(star(star(f, g, p), h, p), star(f, star(g, h, p), p)));
      }
    return w;
  });
  r.below("quantum plane relation", 1e-15, [&] {
    const QPlaneProduct p{q, QPlaneOrdering::Normal};
    Poly u = Poly::var(2, 0), v = Poly::var(2, 1);
    return max_abs_diff(star(v, u, p), star(u, v, p) * (1.0 / q));
  });
  r.below("symmetric to normal homomorphism", 1e-12, [&] {
    double w = 0.0;
    for (int k = 0; k < 20; ++k) {
      Poly f = random_poly(rng, 2, 3, 3), g = random_poly(rng, 2, 3, 3);
      Poly lhs = qplane_symmetric_to_normal(qplane_star(f, g, q, QPlaneOrdering::Symmetric), q);
      Poly rhs = qplane_star(qplane_symmetric_to_normal(f, q), qplane_symmetric_to_normal(g, q), q);
      w = std::max(w, max_abs_diff(lhs, rhs));
    }
    return w;
  });
}

// ---- gauge -------------------------------------------------------------------------

struct GaugeSample {
  GaugeLevel1 f;
  GaugeLevel1 s;  // second parameter
};

GaugeSample random_gauge(BundleShape sh, int S, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, sh.dim() - 1);
  auto var = [&] {
    int v = pick(rng);
    return v < sh.n ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - sh.n + 1);
  };
  auto rnd = [&] {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.6f + %.6f*%s + %.6f*%s*%s + %.6f*%s^3", 0.3 * N(rng),
                  0.3 * N(rng), var().c_str(), 0.3 * N(rng), var().c_str(), var().c_str(), 0.2 * N(rng),
                  var().c_str());
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> q(sh.dim(), std::vector<std::string>(S));
  std::vector<std::string> g(S), s(S);
  for (auto& row : q)
    for (auto& e : row) e = rnd();
  for (auto& e : g) e = rnd();
  for (auto& e : s) e = rnd();
  return {GaugeLevel1::parse(q, g, sh), GaugeLevel1::parse(q, s, sh)};
}

void gauge_suite(Recorder& r, const VerifyOptions& o) {
  const DeSitterAlgebra dS = desitter_algebra({1, 1, 1, 1, -1}, 1.0);
  const DeSitterAlgebra AdS = desitter_algebra({1, -1, -1, -1, -1}, 2.0);

  r.below("de sitter commutators", 1e-12, [&] {
    double w = 0.0;
    for (const auto* A : {&dS, &AdS}) {
      auto sr = desitter_split_residuals(*A);
      w = std::max({w, desitter_commutator_residual(*A), sr.ff, sr.pp, sr.pf});
    }
    return w;
  });
  r.below("de sitter jacobi", 1e-12, [&] {
    double w = 0.0;
    for (const auto* A : {&dS, &AdS})
      w = std::max({w, desitter_matrix_jacobi(*A), A->structure.jacobi_residual(),
                    A->structure.antisymmetry_residual()});
    return w;
  });
  const GaugeRepresentation rep = GaugeRepresentation::desitter(dS);
  r.below("representation brackets", 1e-12, [&] {
    return std::max(rep.bracket_residual(), GaugeRepresentation::su2().bracket_residual());
  });

  r.below("nonlinear potential, two routes", 1e-12, [&] {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> N(0.0, 1.0);
    double w = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
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
      for (int mu = 0; mu < 4; ++mu) w = std::max(w, (a[mu] - b[mu]).cwiseAbs().maxCoeff());
    }
    return w;
  });

  const BundleShape sh{2, 2};
  const GaugeSample gs = random_gauge(sh, static_cast<int>(dS.T.size()), o.seed + 5);
  const LieStructure& L = dS.structure;
  const ThetaMatrix th = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);
  const ThetaMatrix th2 = ThetaMatrix::from_matrix(2.0 * th.theta);
  const ThetaMatrix th0 = ThetaMatrix::from_matrix(Eigen::MatrixXd::Zero(4, 4));
  SampleSpec spec;
  spec.count = 4;
  spec.seed = o.seed;
  const Points pts = sample_points(sh, spec);

  r.below("sw expansion vanishes at theta = 0", 0.0, [&] {
    return max_over(pts, [&](const auto& u) {
      auto z = sw_expand(gs.f, th0, L, u);
      return std::max(max_abs(z.q2), max_abs(z.gamma2));
    });
  });
  r.below("sw expansion linear in theta", 1e-12, [&] {
    return max_over(pts, [&](const auto& u) {
      auto a = sw_expand(gs.f, th, L, u), b = sw_expand(gs.f, th2, L, u);
      double w = 0.0;
      for (std::size_t k = 0; k < a.q2.size(); ++k)
        w = std::max(w, std::abs(b.q2(static_cast<int>(k)) - 2.0 * a.q2(static_cast<int>(k))));
      for (std::size_t k = 0; k < a.gamma2.size(); ++k)
        w = std::max(w, std::abs(b.gamma2(static_cast<int>(k)) - 2.0 * a.gamma2(static_cast<int>(k))));
      return w / std::max(1.0, max_abs(a.q2));
    });
  });
  r.below("corrected curvature linear in theta", 1e-12, [&] {
    return max_over(pts, [&](const auto& u) {
      auto a = corrected_curvature(gs.f, th, L, u), b = corrected_curvature(gs.f, th2, L, u);
      double w = max_abs_diff(a.R1, b.R1);
      for (std::size_t k = 0; k < a.R2.size(); ++k)
        w = std::max(w, std::abs(b.R2(static_cast<int>(k)) - 2.0 * a.R2(static_cast<int>(k))));
      return w / std::max(1.0, max_abs(a.R2));
    });
  });
  r.below("gauge curvature antisymmetry", 1e-12, [&] {
    return max_over(pts, [&](const auto& u) {
      RealTensor R = gauge_curvature(gs.f, L, u);
      double w = 0.0;
      for (int t = 0; t < R.dim(0); ++t)
        for (int m = 0; m < R.dim(1); ++m)
          for (int a = 0; a < R.dim(2); ++a) w = std::max(w, std::abs(R(t, m, a) + R(m, t, a)));
      return w;
    });
  });

  const std::vector<double> u0 = pts[0];
  const GaugeJets J = gauge_jets(gs.f, u0, 3);
  const SwResidual sw = sw_residual(J, th, rep);
  r.below("sw residual, theta^0 and theta^1 terms", 1e-12, [&] { return std::max(sw.order0, sw.order1); });
  r.below("sw residual slope - 2", 0.1, [&] { return std::abs(sw.slope - 2.0); });
  r.below("gauge closure", 1e-9, [&] {
    return closure_check(J.q, J.gamma, parameter_jets(gs.s.gamma1, u0, 3), th, rep).max();
  });
  r.below("curvature covariance", 1e-9, [&] { return covariance_residual(J, th, rep); });
  r.below("corrected curvature, coefficient vs matrix", 1e-12, [&] {
    auto cc = corrected_curvature(J, th, L);
    const int S = L.dim;
    double w = 0.0;
    for (int t = 0; t < 4; ++t)
      for (int l = 0; l < 4; ++l) {
        if (t == l) continue;
        auto M = corrected_curvature_matrix(J, th, rep, t, l);
        std::vector<double> c1(S), c2(S * S);
        for (int a = 0; a < S; ++a) {
          c1[a] = cc.R1(t, l, a);
          for (int b = 0; b < S; ++b) c2[a * S + b] = cc.R2(t, l, a, b);
        }
        w = std::max(w, matrix_max(envelope(rep, c1) - M[0]));
        w = std::max(w, matrix_max(envelope(rep, {}, c2) - M[1]));
      }
    return w;
  });

  r.below("lagrangian rotation invariance", 1e-9, [&] {
    auto src = builtin_geometry("anisotropic");
    const GaugeConstants C{0.8, 1.3};
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> N(0.0, 1.0);
    return max_over(Points(pts.begin(), pts.begin() + 2), [&](const auto& u) {
      GaugeStrength s = gauge_strength(*src, ConnectionSelector::canonical(), u);
      Eigen::MatrixXd X(4, 4);
      for (int i = 0; i < 16; ++i) X(i) = N(rng);
      Eigen::MatrixXd O = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ();
      if (O.determinant() < 0) O.col(0) *= -1.0;
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
      const double L0 = lagrangian_density(s, C);
      return std::abs(lagrangian_density(t, C) - L0) / std::max(1.0, std::abs(L0));
    });
  });

  r.below("gauge/geometry bridge", 1e-8, [&] {
    double w = 0.0;
    for (const char* id : {"sphere2xflat", "anisotropic"}) {
      auto src = builtin_geometry(id);
      w = std::max(w, max_over(pts, [&](const auto& u) {
        auto b = gauge_geometry_bridge(*src, ConnectionSelector::canonical(), 0.7, u);
        return std::max({b.projection_residual, b.curvature_residual, b.torsion_residual});
      }));
    }
    return w;
  });
}

using SuiteFn = void (*)(Recorder&, const VerifyOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> s = {
      {"bundle", bundle_suite},   {"connection", connection_suite}, {"curvature", curvature_suite},
      {"finsler", finsler_suite}, {"spectral", spectral_suite},     {"ncalg", ncalg_suite},
      {"gauge", gauge_suite}};
  return s;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : suites()) out.push_back(name);
  return out;
}

std::vector<Check> verify_suite(const std::string& name, const VerifyOptions& opts) {
  std::vector<Check> out;
  bool found = false;
  for (const auto& [suite, fn] : suites()) {
    if (name != "all" && name != suite) continue;
    found = true;
    Recorder r(out, suite);
    fn(r, opts);
  }
  if (!found) throw ConfigError("unknown suite '" + name + "'");
  return out;
}

const Check* first_failure(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

}  // namespace dgeom
