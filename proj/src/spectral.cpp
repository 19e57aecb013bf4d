#include "dgeom/spectral.hpp"

#include <numbers>

#include "dgeom/jet_linalg.hpp"

namespace dgeom {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

std::vector<Eigen::MatrixXcd> clifford(int d) {
  const cdouble I(0.0, 1.0);
  Eigen::MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  if (d == 1) return {Eigen::MatrixXcd::Identity(1, 1)};
  if (d == 2) return {s1, s2};
  if (d % 2 == 1) {
    auto g = clifford(d - 1);
    const int k = (d - 1) / 2;
    Eigen::MatrixXcd chi = Eigen::MatrixXcd::Identity(g[0].rows(), g[0].cols());
    for (const auto& m : g) chi = chi * m;
    chi *= std::pow(-I, k);
    g.push_back(chi);
    return g;
  }
  auto odd = clifford(d - 1);
  std::vector<Eigen::MatrixXcd> g;
  for (const auto& m : odd) g.push_back(kron(m, s1));
  g.push_back(kron(Eigen::MatrixXcd::Identity(odd[0].rows(), odd[0].cols()), s2));
  return g;
}

Eigen::MatrixXd factor(const Eigen::MatrixXd& a, VielbeinKind kind, const char* what) {
  if (kind == VielbeinKind::Cholesky) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
      throw DegenerateError(std::string(what) + " block is not positive definite");
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw DegenerateError(std::string(what) + " block is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

template <class T>
BasicJet<T> elong(const GeometryJets& G, const BasicJet<T>& f, int alpha) {
  const int n = G.shape.n;
  BasicJet<T> r = f.derivative(alpha);
  if (alpha >= n) return r;
  for (int b = 0; b < G.shape.m; ++b) r -= G.N(b, alpha) * f.derivative(n + b);
  return r;
}

JetTensor block_diag(const JetTensor& a, const JetTensor& b) {
  const int n = a.dim(0), m = b.dim(0);
  const Jet& z = a(0, 0);
  JetTensor r({n + m, n + m}, Jet(z.vars(), std::min(z.order(), b(0, 0).order())));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = a(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(n + i, n + j) = b(i, j);
  return r;
}

Eigen::MatrixXcd values(const std::vector<CJet>& m, int S) {
  Eigen::MatrixXcd r(S, S);
  for (int s = 0; s < S; ++s)
    for (int t = 0; t < S; ++t) r(s, t) = m[s * S + t].value();
  return r;
}

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

GammaSet gammas(int d) {
  if (d < 2 || d > kMaxVars) throw ConfigError("gamma matrices are built for 2 <= d <= 6");
  return {d, clifford(d)};
}

Eigen::MatrixXd VielbeinPoint::full() const {
  const auto n = e_h.rows(), m = e_v.rows();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n + m, n + m);
  E.topLeftCorner(n, n) = e_h;
  E.bottomRightCorner(m, m) = e_v;
  return E;
}

VielbeinPoint vielbein(const Eigen::MatrixXd& g, const Eigen::MatrixXd& h, VielbeinKind kind) {
  return {factor(g, kind, "horizontal metric"), factor(h, kind, "vertical metric")};
}

VielbeinPoint vielbein(const DMetricField& M, std::span<const double> u, VielbeinKind kind) {
  const int n = M.shape.n, m = M.shape.m;
  Eigen::MatrixXd g(n, n), h(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = M.g_at(i, j).eval(u);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) h(a, b) = M.h_at(a, b).eval(u);
  return vielbein(g, h, kind);
}

std::vector<Eigen::MatrixXcd> gamma_frame(const GammaSet& flat, const VielbeinPoint& V) {
  Eigen::MatrixXd Einv = V.full().inverse();
  const int d = static_cast<int>(Einv.rows());
  if (flat.dim != d) throw ConfigError("gamma set dimension differs from the frame");
  std::vector<Eigen::MatrixXcd> out;
  for (int al = 0; al < d; ++al) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(flat.spinor_dim(), flat.spinor_dim());
    for (int a = 0; a < d; ++a) s += Einv(a, al) * flat.g[a];
    out.push_back(s);
  }
  return out;
}

SpinJets spin_jets(const GeometryJets& G, const ConnectionSelector& sel) {
  const int d = G.shape.dim();
  const int K = G.order;
  if (K < 1) throw OrderError("spin connection needs geometry jets of order >= 1");
  SpinJets s;
  s.shape = G.shape;
  s.flat = gammas(d);
  const int S = s.flat.spinor_dim();
  s.E = block_diag(cholesky(G.g, "horizontal metric"), cholesky(G.h, "vertical metric"));
  s.Einv = inverse(s.E, "vielbein");
  s.Gamma = connection_jets(G, sel);
  s.omega = JetTensor({d, d, d}, Jet(d, K - 1));
  for (int b = 0; b < d; ++b)
    for (int mu = 0; mu < d; ++mu) {
      // (D_mu e_b)^beta
      std::vector<Jet> De(d, Jet(d, K - 1));
      for (int be = 0; be < d; ++be) {
        Jet t = elong(G, s.Einv(b, be), mu);
        for (int nu = 0; nu < d; ++nu) t += s.Gamma(be, nu, mu) * s.Einv(b, nu);
        De[be] = t;
      }
      for (int a = 0; a < d; ++a) {
        Jet w(d, K - 1);
        for (int be = 0; be < d; ++be) w += s.E(be, a) * De[be];
        s.omega(a, b, mu) = w;
      }
    }
  s.gamma.assign(d, std::vector<CJet>(S * S, CJet(d, K)));
  for (int al = 0; al < d; ++al)
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < S * S; ++i) {
        const cdouble c = s.flat.g[a](i / S, i % S);
        if (c != 0.0) s.gamma[al][i] += s.Einv(a, al).rmul(c);
      }
  s.spin.assign(d, std::vector<CJet>(S * S, CJet(d, K - 1)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (a == b) continue;
      Eigen::MatrixXcd gg = s.flat.g[a] * s.flat.g[b] * 0.25;
      for (int mu = 0; mu < d; ++mu)
        for (int i = 0; i < S * S; ++i) {
          const cdouble c = gg(i / S, i % S);
          if (c != 0.0) s.spin[mu][i] += s.omega(a, b, mu).rmul(c);
        }
    }
  return s;
}

SpinConnectionPoint spin_connection(const GeometrySource& src, const ConnectionSelector& sel,
                                    std::span<const double> u) {
  GeometryJets G = src.jets(u, 1);
  SpinJets s = spin_jets(G, sel);
  SpinConnectionPoint p;
  p.omega = dgeom::values(s.omega);
  for (const auto& m : s.spin) p.matrices.push_back(values(m, s.flat.spinor_dim()));
  return p;
}

double spin_defining_residual(const SpinJets& s, const GeometryJets& G) {
  const int d = G.shape.dim();
  double worst = 0.0;
  for (int b = 0; b < d; ++b)
    for (int mu = 0; mu < d; ++mu)
      for (int be = 0; be < d; ++be) {
        double r = elong(G, s.Einv(b, be), mu).value();
        for (int nu = 0; nu < d; ++nu) r += s.Gamma(be, nu, mu).value() * s.Einv(b, nu).value();
        for (int a = 0; a < d; ++a) r -= s.omega(a, b, mu).value() * s.Einv(a, be).value();
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

double gamma_covariance_residual(const SpinJets& s, const GeometryJets& G) {
  const int d = G.shape.dim();
  const int S = s.flat.spinor_dim();
  std::vector<Eigen::MatrixXcd> g, spin;
  for (int a = 0; a < d; ++a) {
    g.push_back(values(s.gamma[a], S));
    spin.push_back(values(s.spin[a], S));
  }
  double worst = 0.0;
  for (int mu = 0; mu < d; ++mu)
    for (int al = 0; al < d; ++al) {
      Eigen::MatrixXcd r(S, S);
      for (int i = 0; i < S * S; ++i) r(i / S, i % S) = elong(G, s.gamma[al][i], mu).value();
      for (int nu = 0; nu < d; ++nu) r += s.Gamma(al, nu, mu).value() * g[nu];
      r += spin[mu] * g[al] - g[al] * spin[mu];
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  return worst;
}

SpinorJet SpinorField::eval_jet(std::span<const double> u, int order) const {
  if (!im.empty() && im.size() != re.size()) throw ConfigError("spinor real and imaginary parts differ in length");
  SpinorJet psi;
  for (std::size_t k = 0; k < re.size(); ++k) {
    CJet c = to_complex(re[k].eval_jet(u, order));
    if (!im.empty()) c += im[k].eval_jet(u, order).rmul(cdouble(0.0, 1.0));
    psi.push_back(c);
  }
  return psi;
}

SpinorJet dirac_jets(const SpinorJet& psi, const GeometryJets& G, const SpinJets& s) {
  const int d = G.shape.dim();
  const int S = s.flat.spinor_dim();
  if (static_cast<int>(psi.size()) != S)
    throw ConfigError("spinor has " + std::to_string(psi.size()) + " components, expected " +
                      std::to_string(S));
  const int K = std::min(psi[0].order(), s.gamma[0][0].order()) - 1;
  if (K < 0) throw OrderError("Dirac operator needs jets of order >= 1");
  SpinorJet out(S, CJet(d, K));
  for (int al = 0; al < d; ++al) {
    SpinorJet cov(S, CJet(d, K));
    for (int t = 0; t < S; ++t) {
      cov[t] = elong(G, psi[t], al).truncate(K);
      for (int r = 0; r < S; ++r) cov[t] += s.spin[al][t * S + r] * psi[r];
    }
    for (int a = 0; a < S; ++a)
      for (int t = 0; t < S; ++t) out[a] += s.gamma[al][a * S + t] * cov[t];
  }
  return out;
}

std::vector<cdouble> dirac_apply(const SpinorField& psi, const GeometrySource& src,
                                 const ConnectionSelector& sel, std::span<const double> u) {
  GeometryJets G = src.jets(u, 1);
  SpinJets s = spin_jets(G, sel);
  SpinorJet r = dirac_jets(psi.eval_jet(u, 1), G, s);
  std::vector<cdouble> out;
  for (const auto& c : r) out.push_back(c.value());
  return out;
}

SpectralDensities seeley_densities(const GeometrySource& src, const ConnectionSelector& sel,
                                   double Lambda, std::span<const double> u, VielbeinKind kind) {
  const BundleShape sh = src.shape();
  const int n = sh.n, m = sh.m, d = n + m;
  GeometryJets G = src.jets(u, 4);
  JetTensor Gam = connection_jets(G, sel);
  JetTensor R = curvature_jets(G, Gam, anholonomy_jets(G));
  JetTensor ginv = inverse(G.g, "horizontal metric block g");
  JetTensor hinv = inverse(G.h, "vertical metric block h");
  JetTensor Ric = ricci_jets(R);
  Jet Rj = scalar_jet(Ric, ginv, hinv, sh);

  SpectralDensities D;
  D.R = Rj.value();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D.Rhat += ginv(i, j).value() * Ric(i, j).value();
  D.E = D.R / 4.0;

  Eigen::MatrixXd Ginv = Eigen::MatrixXd::Zero(d, d);
  Ginv.topLeftCorner(n, n) = value_matrix(ginv);
  Ginv.bottomRightCorner(m, m) = value_matrix(hinv);
  std::vector<Jet> dR;
  for (int nu = 0; nu < d; ++nu) dR.push_back(elongated(G, Rj, nu));
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) {
      if (Ginv(mu, nu) == 0.0) continue;
      double t = elongated(G, dR[nu], mu).value();
      for (int rho = 0; rho < d; ++rho) t -= Gam(rho, nu, mu).value() * dR[rho].value();
      D.laplace_R += Ginv(mu, nu) * t;
    }

  // Quadratic invariants in the orthonormal frame of the chosen vielbein.
  Eigen::MatrixXd gv = value_matrix(G.g), hv = value_matrix(G.h);
  Eigen::MatrixXd E = vielbein(gv, hv, kind).full();
  Eigen::MatrixXd Ei = E.inverse();
  RealTensor Rv = dgeom::values(R);
  RealTensor A({d, d, d, d}, 0.0), B({d, d, d, d}, 0.0);
  // Replace index `slot` of `in` by a frame index: out(.., a, ..) = sum_k W(slot, a, k) in(.., k, ..)
  // with W = E(k, a) for the upper slot and Ei(a, k) for the lower ones.
  auto to_frame = [d](const RealTensor& in, RealTensor& out, const Eigen::MatrixXd& M, int slot) {
    int i[4];
    for (i[0] = 0; i[0] < d; ++i[0])
      for (i[1] = 0; i[1] < d; ++i[1])
        for (i[2] = 0; i[2] < d; ++i[2])
          for (i[3] = 0; i[3] < d; ++i[3]) {
            const int a = i[slot];
            int k[4] = {i[0], i[1], i[2], i[3]};
            double s = 0.0;
            for (k[slot] = 0; k[slot] < d; ++k[slot])
              s += (slot == 0 ? M(k[0], a) : M(a, k[slot])) * in(k[0], k[1], k[2], k[3]);
            out(i[0], i[1], i[2], i[3]) = s;
          }
  };
  to_frame(Rv, A, E, 0);
  to_frame(A, B, Ei, 1);
  to_frame(B, A, Ei, 2);
  to_frame(A, B, Ei, 3);
  for (std::size_t i = 0; i < B.size(); ++i) D.riemann2 += B.data()[i] * B.data()[i];
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c) {
      double r = 0.0;
      for (int a = 0; a < d; ++a) r += B(a, b, c, a);
      D.ricci2 += r * r;
    }

  D.trace_I = 1 << (d / 2);
  const double pref = std::pow(4.0 * std::numbers::pi, -d / 2.0) * D.trace_I;
  const double Rre = kA4RETermUsesScalarR ? D.R : D.Rhat;
  D.a0 = std::pow(Lambda, 4) * pref;
  D.a2 = Lambda * Lambda * pref * (-D.R / 6.0 + D.E);
  D.a4 = pref / 360.0 *
         (-12.0 * D.laplace_R + 5.0 * D.R * D.R - 2.0 * D.ricci2 - 1.75 * D.riemann2 -
          60.0 * Rre * D.E + 180.0 * D.E * D.E + 60.0 * D.laplace_R / 4.0);
  D.sqrt_G = std::sqrt(gv.determinant() * hv.determinant());
  return D;
}

CutoffMoments cutoff_moments(double alpha, double beta) {
  CutoffMoments f;
  if (alpha == 0.0) return f;
  if (!(beta > 0.0)) throw ConfigError("modified cutoff needs beta > 0");
  f.f0 = 0.5 * (1.0 - alpha / (beta * beta));
  f.f2 = 1.0 * (1.0 - alpha / beta);
  return f;
}

SpectralAction spectral_action(const GeometrySource& src, const ConnectionSelector& sel,
                               double Lambda, double alpha, double beta,
                               const std::vector<QuadraturePoint>& grid) {
  if (grid.empty()) throw ConfigError("spectral action needs a non-empty grid");
  SpectralAction A;
  A.f = cutoff_moments(alpha, beta);
  std::vector<double> t4, t2;
  for (const auto& q : grid) {
    SpectralDensities D = seeley_densities(src, sel, 1.0, q.u);
    t4.push_back(q.weight * D.sqrt_G * D.a0);
    t2.push_back(q.weight * D.sqrt_G * D.a2);
  }
  A.lambda4 = A.f.f0 * pairwise_sum(t4, 0, t4.size());
  A.lambda2 = A.f.f2 * pairwise_sum(t2, 0, t2.size());
  A.value = A.lambda4 * std::pow(Lambda, 4) + A.lambda2 * Lambda * Lambda;
  return A;
}

}  // namespace dgeom
