// Acceptance run: one PASS/FAIL line per criterion.  Exit 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dgeom/app.hpp"
#include "dgeom/curvature.hpp"
#include "dgeom/finsler.hpp"
#include "dgeom/gauge_sw.hpp"
#include "dgeom/jet_linalg.hpp"
#include "dgeom/spectral.hpp"
#include "dgeom/verify.hpp"
#include "oracles.hpp"

using namespace dgeom;
using oracle::Point;

namespace {

struct Line {
  std::string what;
  double value;
  double tol;
  bool lower = false;
};

int failures = 0;

void report(int id, const std::string& title, const std::vector<Line>& lines, double seconds = -1) {
  bool ok = true;
  std::string detail;
  for (const auto& l : lines) {
    const bool p = std::isfinite(l.value) && (l.lower ? l.value > l.tol : l.value <= l.tol);
    ok = ok && p;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s=%.3e %s %.0e", detail.empty() ? "" : "; ", l.what.c_str(), l.value,
                  l.lower ? ">" : "<=", l.tol);
    detail += buf;
  }
  if (seconds >= 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2fs)", seconds);
    detail += buf;
  }
  if (!ok) ++failures;
  std::printf("%s %2d %-22s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

// Runs a criterion body; an exception fails it with the message.
void criterion(int id, const std::string& title, const std::function<std::vector<Line>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto lines = body();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, title, lines, s);
  } catch (const std::exception& e) {
    ++failures;
    std::printf("FAIL %2d %-22s threw: %s\n", id, title.c_str(), e.what());
  }
}

std::vector<Point> pts(BundleShape s, int count, std::uint64_t seed = 11) {
  SampleSpec spec;
  spec.count = count;
  spec.seed = seed;
  return sample_points(s, spec);
}

double maxd(double a, double b) { return a > b ? a : b; }

Eigen::MatrixXd G_block(const GeometryJets& G) {
  const int n = G.shape.n, m = G.shape.m;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = value_matrix(G.g);
  M.bottomRightCorner(m, m) = value_matrix(G.h);
  return M;
}

Eigen::MatrixXd N_values(const GeometrySource& s, const Point& u) {
  auto G = s.jets(u, 0);
  return value_matrix(G.N);
}

// delta_t of a function of u using differences and the N values at u.
template <class F>
auto adapted_d(const F& f, const Eigen::MatrixXd& N, const Point& u, int t, int n, double h = 1e-3) {
  auto s = oracle::d5(f, u, t, h);
  if (t < n)
    for (int e = 0; e < N.rows(); ++e) s = s - N(e, t) * oracle::d5(f, u, n + e, h);
  return s;
}

// max |D_g G_ab| with the adapted derivative taken by differences.
double metricity_fd(const GeometrySource& src, const ConnectionSelector& sel, const Point& u) {
  const int n = src.shape().n, d = src.shape().dim();
  auto Gm = [&](const Point& x) { return G_block(src.jets(x, 0)); };
  const Eigen::MatrixXd G0 = Gm(u), N = N_values(src, u);
  RealTensor Gam = values(connection_jets(src.jets(u, 1), sel));
  // Finsler metrics vary on the scale |y|; keep the step well inside it.
  double y2 = 0.0;
  for (int a = n; a < d; ++a) y2 += u[a] * u[a];
  const double h = 1e-3 * std::min(1.0, std::sqrt(y2));
  double w = 0.0;
  for (int g = 0; g < d; ++g) {
    Eigen::MatrixXd D = adapted_d(Gm, N, u, g, n, h);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = D(a, b);
        for (int f = 0; f < d; ++f) s -= Gam(f, a, g) * G0(f, b) + Gam(f, b, g) * G0(a, f);
        w = maxd(w, std::abs(s));
      }
  }
  return w;
}

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

std::string rand_field(std::mt19937_64& rng, BundleShape sh) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, sh.dim() - 1);
  auto var = [&] {
    int v = pick(rng);
    return v < sh.n ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - sh.n + 1);
  };
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.5f + %.5f*%s + %.5f*%s*%s + %.5f*sin(%s)", 0.3 * N(rng), 0.3 * N(rng),
                var().c_str(), 0.3 * N(rng), var().c_str(), var().c_str(), 0.2 * N(rng), var().c_str());
  return buf;
}

}  // namespace

int main() {
  const auto canon = ConnectionSelector::canonical();
  const auto lc = ConnectionSelector::levi_civita();

  criterion(1, "metricity", [&] {
    double lib = 0.0, fd = 0.0;
    for (const char* id : {"flat", "sphere2xflat", "anisotropic", "finsler:randers"}) {
      auto src = builtin_geometry(id);
      for (const auto& u : pts(src->shape(), 100)) {
        GeometryJets G = src->jets(u, 1);
        lib = maxd(lib, metric_compatibility_residual(values(connection_jets(G, canon)), G));
        fd = maxd(fd, metricity_fd(*src, canon, u));
      }
    }
    return std::vector<Line>{{"jets", lib, 1e-9}, {"differences", fd, 1e-9}};
  });

  criterion(2, "christoffel reduction", [&] {
    auto src = builtin_geometry("blockdiag");
    const int n = src->shape().n;
    oracle::MatrixFn g = [&](const Point& x) { return value_matrix(src->jets(x, 0).g); };
    oracle::MatrixFn h = [&](const Point& x) { return value_matrix(src->jets(x, 0).h); };
    double w = 0.0, tor = 0.0;
    for (const auto& u : pts(src->shape(), 30)) {
      RealTensor cg = oracle::christoffel(g, u, 0), ch = oracle::christoffel(h, u, n);
      for (const auto& c : {canonical_dconnection(*src, u), levi_civita_anholonomic(*src, u)})
        w = std::max({w, max_abs_diff(c.L_hh, cg), max_abs_diff(c.C_vv_v, ch), max_abs(c.L_vv_h),
                      max_abs(c.C_hh_v)});
      for (const auto& sel : {canon, lc}) tor = maxd(tor, max_abs(d_torsion(*src, sel, u).T));
    }
    return std::vector<Line>{{"coefficients", w, 1e-10}, {"torsion", tor, 1e-12}};
  });

  criterion(3, "pure-gauge coincidence", [&] {
    auto src = builtin_geometry("pure_gauge");
    const int n = 2;
    double w = 0.0, om = 0.0;
    for (const auto& u : pts(src->shape(), 50)) {
      w = maxd(w, max_abs_diff(assemble(canonical_dconnection(*src, u)),
                               assemble(levi_civita_anholonomic(*src, u))));
      auto Nf = [&](const Point& x) { return N_values(*src, x); };
      const Eigen::MatrixXd N = Nf(u);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Eigen::MatrixXd di = adapted_d(Nf, N, u, i, n), dj = adapted_d(Nf, N, u, j, n);
          om = maxd(om, (dj.col(i) - di.col(j)).cwiseAbs().maxCoeff());
        }
    }
    return std::vector<Line>{{"omega", om, 1e-9}, {"canonical-lc", w, 1e-10}};
  });

  criterion(4, "anholonomy", [&] {
    auto src = builtin_geometry("anisotropic");
    const BundleShape sh = src->shape();
    const int n = sh.n, m = sh.m, d = sh.dim();
    std::mt19937_64 rng(4);
    std::vector<ScalarField> fs;
    for (int k = 0; k < 10; ++k) fs.push_back(parse_field(rand_field(rng, sh), sh));
    double comm = 0.0, cross = 0.0;
    for (const auto& u : pts(sh, 50)) {
      GeometryJets G = src->jets(u, 1);
      RealTensor W = values(anholonomy_jets(G));
      RealTensor Om = n_curvature_values(G);
      auto Nf = [&](const Point& x) { return N_values(*src, x); };
      const Eigen::MatrixXd N = Nf(u);
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double fd = adapted_d([&](const Point& x) { return Nf(x)(a, i); }, N, u, j, n) -
                              adapted_d([&](const Point& x) { return Nf(x)(a, j); }, N, u, i, n);
            cross = std::max({cross, std::abs(W(n + a, i, j) - Om(a, i, j)), std::abs(Om(a, i, j) - fd)});
          }
      for (const auto& f : fs) {
        auto F = [&](const Point& x) { return f.eval(x); };
        std::vector<double> df(d);
        for (int c = 0; c < d; ++c) df[c] = adapted_d(F, N, u, c, n);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            auto db = [&](const Point& x) { return adapted_d(F, Nf(x), x, b, n, 1e-3); };
            auto da = [&](const Point& x) { return adapted_d(F, Nf(x), x, a, n, 1e-3); };
            double s = adapted_d(db, N, u, a, n, 1e-3) - adapted_d(da, N, u, b, n, 1e-3);
            for (int c = 0; c < d; ++c) s -= W(c, a, b) * df[c];
            comm = maxd(comm, std::abs(s));
          }
      }
    }
    return std::vector<Line>{{"commutator", comm, 1e-8}, {"W=omega", cross, 1e-10}};
  });

  criterion(5, "curvature sanity", [&] {
    double sph = 0.0, sph_fd = 0.0;
    for (double r : {1.0, 1.5}) {
      auto src = builtin_geometry("sphere2xflat:" + std::to_string(r));
      oracle::MatrixFn g = [&](const Point& x) { return value_matrix(src->jets(x, 0).g); };
      for (const auto& u : pts(src->shape(), 10)) {
        auto c = d_curvature(*src, canon, u);
        sph = maxd(sph, std::abs(ricci_scalar(c, src->jets(u, 2)).Rhat - 2.0 / (r * r)));
        RealTensor R = oracle::riemann(g, u, 0);
        Eigen::MatrixXd gi = g(u).inverse();
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int b = 0; b < 2; ++b) s += gi(j, b) * R(i, j, i, b);
        sph_fd = maxd(sph_fd, std::abs(s - 2.0 / (r * r)));
      }
    }
    double flat = 0.0;
    for (const char* id : {"flat", "flat:3,3"}) {
      auto src = builtin_geometry(id);
      for (const auto& u : pts(src->shape(), 10)) {
        auto c = d_curvature(*src, canon, u);
        for (const auto* t : {&c.R_h, &c.R_v, &c.P_h, &c.P_v, &c.S_h, &c.S_v}) flat = maxd(flat, max_abs(*t));
      }
    }
    double jfd = 0.0;
    for (const char* id : {"anisotropic", "pure_gauge"}) {
      auto src = builtin_geometry(id);
      for (const auto& u : pts(src->shape(), 5))
        jfd = maxd(jfd, max_abs_diff(d_curvature(*src, canon, u).R, oracle::curvature(*src, canon, u)));
    }
    return std::vector<Line>{{"2/r^2", sph, 1e-8}, {"2/r^2 differences", sph_fd, 1e-8},
                             {"flat", flat, 1e-12}, {"jets-vs-fd", jfd, 1e-5}};
  });

  criterion(6, "ricci asymmetry", [&] {
    auto an = builtin_geometry("anisotropic");
    const int n = 2, m = 2;
    double lib = 0.0, fd = 0.0;
    for (const auto& u : pts(an->shape(), 10)) {
      RicciPoint R = ricci_scalar(d_curvature(*an, canon, u), an->jets(u, 2));
      RealTensor C = oracle::curvature(*an, canon, u);
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) {
          lib = maxd(lib, std::abs(R.P1(a, i) - R.P2(i, a)));
          double p1 = 0.0, p2 = 0.0;
          for (int b = 0; b < m; ++b) p1 += C(n + b, n + a, i, n + b);
          for (int k = 0; k < n; ++k) p2 += C(k, i, n + a, k);
          fd = maxd(fd, std::abs(p1 - p2));
        }
    }
    auto bd = builtin_geometry("blockdiag");
    double mixed = 0.0;
    for (const auto& u : pts(bd->shape(), 20)) {
      RicciPoint R = ricci_scalar(d_curvature(*bd, lc, u), bd->jets(u, 2));
      mixed = std::max({mixed, max_abs(R.P1), max_abs(R.P2)});
    }
    return std::vector<Line>{{"|1P-2P|", lib, 1e-6, true}, {"|1P-2P| fd", fd, 1e-6, true},
                             {"N=0 mixed", mixed, 1e-10}};
  });

  criterion(7, "finsler", [&] {
    const std::vector<std::vector<std::string>> rows = {{"1+0.2*x1^2", "0.1*x1*x2"},
                                                       {"0.1*x1*x2", "1+0.3*x2^2+0.1*sin(x1)"}};
    std::vector<FinslerFunction> F = {FinslerFunction::builtin("euclidean", 2),
                                      FinslerFunction::builtin("quartic", 2),
                                      FinslerFunction::builtin("riemann", 3),
                                      FinslerFunction::builtin("randers", 2),
                                      FinslerFunction::builtin("randers", 3),
                                      FinslerFunction::builtin("riemann:1+0.2*x1^2,0.1*x1*x2;0.1*x1*x2,1+0.3*x2^2+0.1*sin(x1)", 2)};
    double hom = 0.0, kah = 0.0, kah_fd = 0.0;
    for (const auto& f : F) {
      const int n = f.n();
      for (const auto& u : pts(f.shape(), 10)) {
        Eigen::MatrixXd g = finsler_metric(f, u).g;
        for (double s : {0.5, 2.0, 3.0}) {
          Point v = u;
          for (int i = n; i < 2 * n; ++i) v[i] *= s;
          hom = maxd(hom, (finsler_metric(f, v).g - g).cwiseAbs().maxCoeff());
        }
        kah = maxd(kah, kahler_form_closure(f, u));
        // theta = g_ij (dy^i + N^i_k dx^k) ^ dx^j as an antisymmetric array
        auto A = [&](const Point& x) {
          Eigen::MatrixXd gx = finsler_metric(f, x).g, N = cartan_nconnection(f, x);
          Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              a(n + i, j) += gx(i, j);
              a(j, n + i) -= gx(i, j);
              for (int k = 0; k < n; ++k) {
                a(k, j) += gx(i, j) * N(i, k);
                a(j, k) -= gx(i, j) * N(i, k);
              }
            }
          return a;
        };
        std::vector<Eigen::MatrixXd> dA;
        for (int l = 0; l < 2 * n; ++l) dA.push_back(oracle::d5(A, u, l, 1e-3));
        for (int l = 0; l < 2 * n; ++l)
          for (int p = 0; p < 2 * n; ++p)
            for (int q = 0; q < 2 * n; ++q)
              kah_fd = maxd(kah_fd, std::abs(dA[l](p, q) + dA[p](q, l) + dA[q](l, p)));
      }
    }
    const FinslerFunction& rf = F.back();
    oracle::MatrixFn g = oracle::block(rows, rf.shape());
    double red = 0.0;
    for (const auto& u : pts(rf.shape(), 20)) {
      RealTensor G = oracle::christoffel(g, u, 0);
      Eigen::MatrixXd N = cartan_nconnection(rf, u);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double want = 0.0;
          for (int k = 0; k < 2; ++k) want += G(i, j, k) * u[2 + k];
          red = maxd(red, std::abs(N(i, j) - want));
        }
    }
    return std::vector<Line>{{"0-homogeneity", hom, 1e-9}, {"N=Gamma y", red, 1e-8},
                             {"kahler", kah, 1e-7}, {"kahler fd", kah_fd, 1e-7}};
  });

  criterion(8, "clifford/spin", [&] {
    double cl = 0.0, spin = 0.0, lich = 0.0;
    for (const char* id : {"sphere2xflat", "anisotropic", "sphere2xflat:1,3", "flat:3,2", "finsler:randers"}) {
      auto src = builtin_geometry(id);
      const BundleShape sh = src->shape();
      const int d = sh.dim();
      const GammaSet flat = gammas(d);
      const long S = flat.spinor_dim();
      for (const auto& u : pts(sh, 10)) {
        GeometryJets G = src->jets(u, 2);
        Eigen::MatrixXd Gi = G_block(G).inverse();
        auto cg = gamma_frame(flat, vielbein(value_matrix(G.g), value_matrix(G.h)));
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            cl = maxd(cl, (cg[a] * cg[b] + cg[b] * cg[a] - 2.0 * Gi(a, b) * Eigen::MatrixXcd::Identity(S, S))
                              .cwiseAbs()
                              .maxCoeff());
        spin = maxd(spin, spin_defining_residual(spin_jets(G, canon), G));
      }
    }
    auto src = builtin_geometry("flat");
    const BundleShape sh = src->shape();
    const int d = sh.dim(), S = gammas(d).spinor_dim();
    std::mt19937_64 rng(8);
    for (int k = 0; k < 5; ++k) {
      SpinorField psi;
      for (int s = 0; s < S; ++s) {
        psi.re.push_back(parse_field(rand_field(rng, sh), sh));
        psi.im.push_back(parse_field(rand_field(rng, sh), sh));
      }
      for (const auto& u : pts(sh, 3)) {
        GeometryJets G = src->jets(u, 3);
        SpinJets sj = spin_jets(G, canon);
        SpinorJet p = psi.eval_jet(u, 2);
        SpinorJet DD = dirac_jets(dirac_jets(p, G, sj), G, sj);
        for (int s = 0; s < S; ++s) {
          auto re = [&](const Point& x) { return psi.re[s].eval(x); };
          auto im = [&](const Point& x) { return psi.im[s].eval(x); };
          cdouble lap = 0.0;
          for (int a = 0; a < d; ++a) {
            auto dre = [&](const Point& x) { return oracle::d5(re, x, a, 1e-3); };
            auto dim = [&](const Point& x) { return oracle::d5(im, x, a, 1e-3); };
            lap += cdouble(oracle::d5(dre, u, a, 1e-3), oracle::d5(dim, u, a, 1e-3));
          }
          lich = maxd(lich, std::abs(DD[s].value() - lap));
        }
      }
    }
    return std::vector<Line>{{"anticommutator", cl, 1e-12}, {"spin defining", spin, 1e-9},
                             {"lichnerowicz", lich, 1e-6}};
  });

  criterion(9, "spectral", [&] {
    CutoffMoments m = cutoff_moments(0.0, 1.0);
    const double mom = maxd(std::abs(m.f0 - 0.5), std::abs(m.f2 - 1.0));
    // chi~ = chi(z) - a chi(b z): f0 = (1 - a/b^2)/2, f2 = 1 - a/b
    double closed = 0.0, l4 = 0.0;
    auto sphere = builtin_geometry("sphere2xflat");
    std::vector<QuadraturePoint> grid;
    for (const auto& u : pts(sphere->shape(), 4)) grid.push_back({u, 0.25});
    for (double b : {0.5, 0.7, 1.3}) {
      for (double a : {0.3, 1.1}) {
        CutoffMoments c = cutoff_moments(a, b);
        closed = std::max({closed, std::abs(c.f0 - 0.5 * (1 - a / (b * b))), std::abs(c.f2 - (1 - a / b))});
      }
      l4 = maxd(l4, std::abs(spectral_action(*sphere, canon, 2.0, b * b, b, grid).lambda4));
    }
    double a2 = 0.0;
    const double pi = std::acos(-1.0);
    for (double r : {1.0, 1.5}) {
      auto src = builtin_geometry("sphere2xflat:" + std::to_string(r));
      const int d = src->shape().dim();
      const double trI = std::pow(2.0, d / 2);
      for (double L : {1.0, 1.7})
        for (const auto& u : pts(src->shape(), 5)) {
          auto D = seeley_densities(*src, canon, L, u);
          const double want = L * L * std::pow(4 * pi, -d / 2.0) * (2.0 / (r * r) / 12.0) * trI;
          a2 = maxd(a2, std::abs(D.a2 - want));
        }
    }
    return std::vector<Line>{{"f0,f2", mom, 1e-15}, {"moments closed form", closed, 1e-14},
                             {"lambda^4", l4, 0.0}, {"a2", a2, 1e-9}};
  });

  criterion(10, "star products", [&] {
    std::mt19937_64 rng(10);
    const ThetaMatrix th = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);
    const MoyalProduct mo{th};
    double assoc = 0.0, series = 0.0;
    for (int k = 0; k < 50; ++k) {
      Poly f = random_poly(rng, 4, 4, 5), g = random_poly(rng, 4, 4, 5), h = random_poly(rng, 4, 4, 5);
      assoc = maxd(assoc, max_abs_diff(star(star(f, g, mo), h, mo), star(f, star(g, h, mo), mo)));
      if (k < 10) series = maxd(series, max_abs_diff(star(f, g, mo), oracle::moyal(f, g, th.theta)));
    }
    double comm = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        comm = maxd(comm, max_abs_diff(star_commutator(Poly::var(4, i), Poly::var(4, j), mo),
                                       Poly::constant(4, cdouble(0.0, th.theta(i, j)))));
    const LieStructure L = LieStructure::su2();
    double lie = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Poly want(3);
        for (int k = 0; k < 3; ++k) want += Poly::var(3, k, cdouble(0.0, L.at(i, j, k)));
        lie = maxd(lie, max_abs_diff(star_commutator(Poly::var(3, i), Poly::var(3, j), LieProduct{L, 1}), want));
      }
    const cdouble q(0.8, 0.35);
    const QPlaneProduct qp{q, QPlaneOrdering::Normal};
    std::uniform_int_distribution<int> ex(0, 3);
    double qa = 0.0, qw = 0.0;
    for (int k = 0; k < 30; ++k) {
      Poly f = Poly::monomial({ex(rng), ex(rng)}, 1.0), g = Poly::monomial({ex(rng), ex(rng)}, 1.0),
           h = Poly::monomial({ex(rng), ex(rng)}, 1.0);
      qa = maxd(qa, max_abs_diff(star(star(f, g, qp), h, qp), star(f, star(g, h, qp), qp)));
      qw = maxd(qw, max_abs_diff(star(f, g, qp), oracle::qplane_words(f, g, q)));
    }
    return std::vector<Line>{{"moyal assoc", assoc, 1e-12}, {"moyal series", series, 1e-12},
                             {"[ui,uj]", comm, 1e-15}, {"lie order 1", lie, 1e-15},
                             {"qplane assoc", qa, 1e-12}, {"qplane words", qw, 1e-12}};
  });

  criterion(11, "de sitter algebra", [&] {
    double rel = 0.0, gen = 0.0, fT = 0.0, jac = 0.0;
    for (auto [eta, l] : {std::pair{std::array<int, 5>{1, 1, 1, 1, -1}, 1.0},
                          std::pair{std::array<int, 5>{1, -1, -1, -1, -1}, 2.0},
                          std::pair{std::array<int, 5>{1, 1, 1, 1, 1}, 0.7}}) {
      const DeSitterAlgebra A = desitter_algebra(eta, l);
      auto M = [&](int a, int b) {
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(5, 5);
        for (int d = 0; d < 5; ++d) {
          if (a == d) X(b, d) += eta[a];
          if (b == d) X(a, d) -= eta[b];
        }
        return X;
      };
      auto e = [&](int a, int b) { return a == b ? double(eta[a]) : 0.0; };
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
          gen = maxd(gen, (A.generator(a, b) - M(a, b)).cwiseAbs().maxCoeff());
          for (int c = 0; c < 5; ++c)
            for (int d = 0; d < 5; ++d) {
              Eigen::MatrixXd lhs = A.generator(a, b) * A.generator(c, d) - A.generator(c, d) * A.generator(a, b);
              Eigen::MatrixXd rhs = e(a, d) * M(c, b) - e(a, c) * M(d, b) - e(b, d) * M(c, a) + e(b, c) * M(d, a);
              rel = maxd(rel, (lhs - rhs).cwiseAbs().maxCoeff());
            }
        }
      const int S = static_cast<int>(A.T.size());
      for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b) {
          Eigen::MatrixXd c = A.T[a] * A.T[b] - A.T[b] * A.T[a];
          for (int k = 0; k < S; ++k) c -= A.structure.at(a, b, k) * A.T[k];
          fT = maxd(fT, c.cwiseAbs().maxCoeff());
          for (int k = 0; k < S; ++k) {
            Eigen::MatrixXd j = A.T[a] * (A.T[b] * A.T[k] - A.T[k] * A.T[b]) -
                                (A.T[b] * A.T[k] - A.T[k] * A.T[b]) * A.T[a] +
                                A.T[b] * (A.T[k] * A.T[a] - A.T[a] * A.T[k]) -
                                (A.T[k] * A.T[a] - A.T[a] * A.T[k]) * A.T[b] +
                                A.T[k] * (A.T[a] * A.T[b] - A.T[b] * A.T[a]) -
                                (A.T[a] * A.T[b] - A.T[b] * A.T[a]) * A.T[k];
            jac = maxd(jac, j.cwiseAbs().maxCoeff());
          }
        }
      jac = std::max({jac, A.structure.jacobi_residual(), desitter_commutator_residual(A)});
      auto sr = desitter_split_residuals(A);
      rel = std::max({rel, sr.ff, sr.pp, sr.pf});
    }
    return std::vector<Line>{{"generators", gen, 1e-15}, {"M commutators", rel, 1e-12},
                             {"structure constants", fT, 1e-12}, {"jacobi", jac, 1e-12}};
  });

  criterion(12, "seiberg-witten", [&] {
    const DeSitterAlgebra dS = desitter_algebra({1, 1, 1, 1, -1}, 1.0);
    const LieStructure& L = dS.structure;
    const int S = L.dim;
    const BundleShape sh{2, 2};
    std::mt19937_64 rng(12);
    std::vector<std::vector<std::string>> q(4, std::vector<std::string>(S));
    std::vector<std::string> g(S), s(S);
    for (auto& row : q)
      for (auto& e : row) e = rand_field(rng, sh);
    for (auto& e : g) e = rand_field(rng, sh);
    for (auto& e : s) e = rand_field(rng, sh);
    const GaugeLevel1 f = GaugeLevel1::parse(q, g, sh), f2 = GaugeLevel1::parse(q, s, sh);
    const ThetaMatrix th = ThetaMatrix::from_csv("0.3,-0.2,0.5,0.1,0.7,-0.4", 4);
    const ThetaMatrix th0 = ThetaMatrix::from_matrix(Eigen::MatrixXd::Zero(4, 4));
    double zero = 0.0, lin = 0.0;
    for (const auto& u : pts(sh, 4)) {
      auto z = sw_expand(f, th0, L, u);
      zero = std::max({zero, max_abs(z.q2), max_abs(z.gamma2)});
      auto a = sw_expand(f, th, L, u);
      for (double c : {0.5, -1.0, 3.0}) {
        auto b = sw_expand(f, ThetaMatrix::from_matrix(c * th.theta), L, u);
        const double sc = maxd(1.0, max_abs(a.q2));
        for (std::size_t k = 0; k < a.q2.size(); ++k)
          lin = maxd(lin, std::abs(b.q2(int(k)) - c * a.q2(int(k))) / sc);
        for (std::size_t k = 0; k < a.gamma2.size(); ++k)
          lin = maxd(lin, std::abs(b.gamma2(int(k)) - c * a.gamma2(int(k))) / sc);
      }
    }
    const GaugeRepresentation rep = GaugeRepresentation::desitter(dS);
    const Point u0 = pts(sh, 1)[0];
    const GaugeJets J = gauge_jets(f, u0, 3);
    const SwResidual sw = sw_residual(J, th, rep, {1.0, 0.5, 0.25});
    // slope from the two halvings, independent of the library fit
    const double s1 = std::log2(sw.residuals[0] / sw.residuals[1]);
    const double s2 = std::log2(sw.residuals[1] / sw.residuals[2]);
    const double slope_err = maxd(std::abs(0.5 * (s1 + s2) - 2.0), std::abs(sw.slope - 2.0));
    const double clo = closure_check(J.q, J.gamma, parameter_jets(f2.gamma1, u0, 3), th, rep).max();
    return std::vector<Line>{{"theta=0", zero, 1e-12}, {"linear", lin, 1e-12},
                             {"|slope-2|", slope_err, 0.1}, {"closure", clo, 1e-9}};
  });

  criterion(13, "gauge/geometry bridge", [&] {
    double w = 0.0, fd = 0.0;
    for (const char* id : {"sphere2xflat", "anisotropic", "pure_gauge"}) {
      auto src = builtin_geometry(id);
      for (const auto& u : pts(src->shape(), 5)) {
        auto b = gauge_geometry_bridge(*src, canon, 0.7, u);
        w = std::max({w, b.projection_residual, b.curvature_residual, b.torsion_residual});
        fd = std::max({fd, max_abs_diff(b.gauge_F, b.geometry_F), max_abs_diff(b.gauge_T, b.geometry_T)});
      }
    }
    return std::vector<Line>{{"residuals", w, 1e-8}, {"F and T blocks", fd, 1e-8}};
  });

  criterion(14, "determinism/runtime", [&] {
    double diff = 0.0;
    for (const char* name : {"sphere_einstein.json", "anisotropic.json", "randers.json"}) {
      RunConfig a = load_config(std::string(DGEOM_CONFIG_DIR) + "/" + name);
      RunConfig b = load_config(std::string(DGEOM_CONFIG_DIR) + "/" + name);
      a.threads = 1;
      b.threads = 4;
      const std::string da = dump_report(run_report(a).report), db = dump_report(run_report(b).report);
      const std::string dc = dump_report(run_report(a).report);
      if (da != db || da != dc) diff += 1.0;
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto checks = verify_suite("all");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double failed = first_failure(checks) ? 1.0 : 0.0;
    return std::vector<Line>{{"differing reports", diff, 0.0}, {"verify failures", failed, 0.0},
                             {"verify seconds", secs, 120.0}};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
