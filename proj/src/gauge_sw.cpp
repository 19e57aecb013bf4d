#include "dgeom/gauge_sw.hpp"

#include <cmath>

#include "dgeom/jet_linalg.hpp"
#include "dgeom/spectral.hpp"

namespace dgeom {

namespace {

constexpr cdouble kI{0.0, 1.0};

Eigen::MatrixXd M_matrix(const std::array<int, 5>& eta, int A, int B) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
  // (M_AB)^C_D = eta_AD delta^C_B - eta_BD delta^C_A
  for (int C = 0; C < 5; ++C)
    for (int D = 0; D < 5; ++D) {
      double v = 0.0;
      if (C == B && D == A) v += eta[A];
      if (C == A && D == B) v -= eta[B];
      m(C, D) = v;
    }
  return m;
}

Eigen::MatrixXd comm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a * b - b * a; }

// Coefficients of X in a basis with pairwise disjoint supports.
std::vector<double> project(const std::vector<Eigen::MatrixXd>& T, const Eigen::MatrixXd& X) {
  std::vector<double> c(T.size());
  for (std::size_t s = 0; s < T.size(); ++s) c[s] = (T[s].array() * X.array()).sum() / T[s].squaredNorm();
  return c;
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& T, const std::vector<double>& c) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(T[0].rows(), T[0].cols());
  for (std::size_t s = 0; s < T.size(); ++s) r += c[s] * T[s];
  return r;
}

}  // namespace

int DeSitterAlgebra::F_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  static constexpr int tab[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return tab[a][b];
}

DeSitterAlgebra desitter_algebra(const std::array<int, 5>& eta, double l) {
  for (int e : eta)
    if (e != 1 && e != -1) throw ConfigError("de Sitter signature entries must be +1 or -1");
  if (!(l > 0.0)) throw ConfigError("de Sitter radius must be positive");
  DeSitterAlgebra A;
  A.eta = eta;
  A.l = l;
  A.M.resize(25);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) A.M[a * 5 + b] = M_matrix(eta, a, b);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      A.T.push_back(A.generator(a, b));
      A.labels.push_back("F" + std::to_string(a + 1) + std::to_string(b + 1));
    }
  for (int a = 0; a < 4; ++a) {
    A.T.push_back(A.generator(4, a) / l);
    A.labels.push_back("P" + std::to_string(a + 1));
  }
  const int S = static_cast<int>(A.T.size());
  A.structure = LieStructure::zero(S);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      auto c = project(A.T, comm(A.T[a], A.T[b]));
      for (int k = 0; k < S; ++k) A.structure.at(a, b, k) = c[k];
    }
  return A;
}

double desitter_commutator_residual(const DeSitterAlgebra& A) {
  const auto& e = A.eta;
  auto M = [&](int a, int b) -> const Eigen::MatrixXd& { return A.generator(a, b); };
  double worst = 0.0;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) pairs.emplace_back(a, b);
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (std::size_t q = p + 1; q < pairs.size(); ++q) {
      auto [a, b] = pairs[p];
      auto [c, d] = pairs[q];
      Eigen::MatrixXd rhs = (a == c ? e[a] : 0) * M(b, d) - (b == c ? e[b] : 0) * M(a, d) -
                            (a == d ? e[a] : 0) * M(b, c) + (b == d ? e[b] : 0) * M(a, c);
      worst = std::max(worst, (comm(M(a, b), M(c, d)) - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

SplitResiduals desitter_split_residuals(const DeSitterAlgebra& A) {
  const auto& e = A.eta;
  auto F = [&](int a, int b) -> Eigen::MatrixXd { return A.generator(a, b); };
  auto P = [&](int a) -> Eigen::MatrixXd { return A.generator(4, a) / A.l; };
  auto eta = [&](int a, int b) { return a == b ? double(e[a]) : 0.0; };
  SplitResiduals r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      r.pp = std::max(r.pp, (comm(P(a), P(b)) - e[4] / (A.l * A.l) * F(a, b)).cwiseAbs().maxCoeff());
      for (int c = 0; c < 4; ++c) {
        Eigen::MatrixXd pf = eta(a, c) * P(b) - eta(a, b) * P(c);
        r.pf = std::max(r.pf, (comm(P(a), F(b, c)) - pf).cwiseAbs().maxCoeff());
        for (int d = 0; d < 4; ++d) {
          Eigen::MatrixXd ff = eta(a, c) * F(b, d) - eta(b, c) * F(a, d) + eta(b, d) * F(a, c) -
                               eta(a, d) * F(b, c);
          r.ff = std::max(r.ff, (comm(F(a, b), F(c, d)) - ff).cwiseAbs().maxCoeff());
        }
      }
    }
  return r;
}

double desitter_matrix_jacobi(const DeSitterAlgebra& A) {
  double worst = 0.0;
  const auto& T = A.T;
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t b = 0; b < T.size(); ++b)
      for (std::size_t c = 0; c < T.size(); ++c) {
        Eigen::MatrixXd j = comm(T[a], comm(T[b], T[c])) + comm(T[b], comm(T[c], T[a])) +
                            comm(T[c], comm(T[a], T[b]));
        worst = std::max(worst, j.cwiseAbs().maxCoeff());
      }
  return worst;
}

// ---- nonlinear realization -------------------------------------------------

namespace {

void check_coset(const CosetData& c) {
  if (std::abs(1.0 + c.t(4)) < 1e-12) throw DomainError("coset section at the pole 1 + t^5 = 0");
  if (c.dt.rows() != 5 || c.dt.cols() != static_cast<int>(c.omega.size()) ||
      c.theta_tilde.size() != c.omega.size())
    throw ConfigError("coset data: omega, theta~ and dt must cover the same directions");
}

template <class S>
std::array<std::array<S, 5>, 5> coset_generic(const std::array<int, 5>& eta, const std::array<S, 5>& t) {
  auto plus = [](S x, double c) {
    if constexpr (std::is_same_v<S, double>) {
      return x + c;
    } else {
      x.add_constant(c);
      return x;
    }
  };
  std::array<std::array<S, 5>, 5> b;
  const S den = plus(t[4], 1.0);
  for (int a = 0; a < 4; ++a) {
    for (int c = 0; c < 4; ++c) b[a][c] = plus(t[a] * (t[c] * double(eta[c])) / den, a == c ? 1.0 : 0.0);
    b[a][4] = t[a];
    b[4][a] = t[a] * double(eta[a]);
  }
  b[4][4] = t[4];
  return b;
}

}  // namespace

Eigen::MatrixXd coset_matrix(const std::array<int, 5>& eta, const Eigen::Matrix<double, 5, 1>& t) {
  if (std::abs(1.0 + t(4)) < 1e-12) throw DomainError("coset section at the pole 1 + t^5 = 0");
  std::array<double, 5> tt;
  for (int A = 0; A < 5; ++A) tt[A] = t(A);
  auto b = coset_generic<double>(eta, tt);
  Eigen::MatrixXd m(5, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) m(r, c) = b[r][c];
  return m;
}

std::vector<Eigen::MatrixXd> nonlinear_potential(const CosetData& c) {
  check_coset(c);
  const auto& e = c.eta;
  Eigen::Vector4d t = c.t.head<4>(), tl;
  for (int a = 0; a < 4; ++a) tl(a) = e[a] * t(a);
  const double t5 = c.t(4), den = 1.0 + t5;
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t mu = 0; mu < c.omega.size(); ++mu) {
    const Eigen::Matrix4d& w = c.omega[mu];
    const Eigen::Vector4d& th = c.theta_tilde[mu];
    Eigen::Vector4d thl;
    for (int a = 0; a < 4; ++a) thl(a) = e[a] * th(a);
    Eigen::Vector4d Dt = c.dt.col(mu).head<4>() + w * t, Dtl;
    for (int a = 0; a < 4; ++a) Dtl(a) = e[a] * Dt(a);
    Eigen::Matrix4d G = w - (t * Dtl.transpose() - Dt * tl.transpose()) / den -
                        (t * thl.transpose() - th * tl.transpose());
    Eigen::Vector4d theta = t5 * th + Dt - t * (c.dt(4, mu) + thl.dot(t)) / den;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
    m.topLeftCorner(4, 4) = G;
    for (int a = 0; a < 4; ++a) {
      m(a, 4) = theta(a);
      m(4, a) = e[a] * theta(a) * (-e[4]);
    }
    out.push_back(m);
  }
  return out;
}

std::vector<Eigen::MatrixXd> dressed_potential(const CosetData& c) {
  check_coset(c);
  const auto& e = c.eta;
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t mu = 0; mu < c.omega.size(); ++mu) {
    std::array<Jet, 5> t;
    for (int A = 0; A < 5; ++A) {
      t[A] = Jet::variable(1, 1, 0, c.t(A));
      t[A][1] = c.dt(A, mu);
    }
    auto bj = coset_generic<Jet>(e, t);
    Eigen::MatrixXd b(5, 5), db(5, 5);
    for (int r = 0; r < 5; ++r)
      for (int s = 0; s < 5; ++s) {
        b(r, s) = bj[r][s].value();
        db(r, s) = bj[r][s].d1(0);
      }
    Eigen::MatrixXd Om = Eigen::MatrixXd::Zero(5, 5);
    Om.topLeftCorner(4, 4) = c.omega[mu];
    for (int a = 0; a < 4; ++a) {
      Om(a, 4) = c.theta_tilde[mu](a);
      Om(4, a) = e[a] * c.theta_tilde[mu](a) * (-e[4]);
    }
    Eigen::MatrixXd binv = b.inverse();
    out.push_back(binv * Om * b + binv * db);
  }
  return out;
}

// ---- level-1 coefficients ----------------------------------------------------

GaugeLevel1 GaugeLevel1::parse(const std::vector<std::vector<std::string>>& q,
                               const std::vector<std::string>& gamma, BundleShape s) {
  validate(s);
  GaugeLevel1 f;
  f.shape = s;
  if (static_cast<int>(q.size()) != s.dim()) throw ConfigError("q1 needs one row per coordinate");
  f.S = q.empty() ? 0 : static_cast<int>(q[0].size());
  if (f.S == 0) throw ConfigError("q1 rows must not be empty");
  for (const auto& row : q) {
    if (static_cast<int>(row.size()) != f.S) throw ConfigError("q1 rows need one entry per generator");
    for (const auto& e : row) f.q1.push_back(parse_field(e, s));
  }
  if (!gamma.empty() && static_cast<int>(gamma.size()) != f.S)
    throw ConfigError("gamma1 needs one entry per generator");
  for (const auto& e : gamma) f.gamma1.push_back(parse_field(e, s));
  return f;
}

JetTensor parameter_jets(const std::vector<ScalarField>& gamma, std::span<const double> u, int order) {
  if (gamma.empty()) return {};
  auto js = eval_jets(gamma, u, order);
  JetTensor g({static_cast<int>(js.size())});
  for (std::size_t a = 0; a < js.size(); ++a) g(static_cast<int>(a)) = js[a];
  return g;
}

GaugeJets gauge_jets(const GaugeLevel1& f, std::span<const double> u, int order) {
  const int d = f.shape.dim();
  GaugeJets g;
  g.q = JetTensor({d, f.S});
  auto qs = eval_jets(f.q1, u, order);
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < f.S; ++a) g.q(mu, a) = qs[mu * f.S + a];
  g.gamma = parameter_jets(f.gamma1, u, order);
  return g;
}

namespace {

void check_structure(const JetTensor& q, const LieStructure& L) {
  if (q.dim(1) != L.dim) throw ConfigError("gauge field and structure constants disagree on S");
}

}  // namespace

JetTensor gauge_curvature_jets(const JetTensor& q, const LieStructure& L) {
  check_structure(q, L);
  const int d = q.dim(0), S = q.dim(1);
  const int vars = q(0, 0).vars(), K = q(0, 0).order();
  if (K < 1) throw OrderError("gauge curvature needs q1 jets of order >= 1");
  JetTensor R({d, d, S}, Jet(vars, K - 1));
  for (int t = 0; t < d; ++t)
    for (int m = t + 1; m < d; ++m)
      for (int b = 0; b < S; ++b) {
        Jet r = q(m, b).derivative(t) - q(t, b).derivative(m);
        for (int e = 0; e < S; ++e)
          for (int c = 0; c < S; ++c) {
            const double f = L.at(e, c, b);
            if (f != 0.0) r += (q(t, e) * q(m, c)) * f;
          }
        R(t, m, b) = r;
        R(m, t, b) = -r;
      }
  return R;
}

RealTensor gauge_curvature(const GaugeLevel1& f, const LieStructure& L, std::span<const double> u) {
  return values(gauge_curvature_jets(gauge_jets(f, u, 1).q, L));
}

JetTensor gauge_variation_jets(const JetTensor& q, const JetTensor& gamma, const LieStructure& L) {
  check_structure(q, L);
  const int d = q.dim(0), S = q.dim(1);
  if (gamma.size() != static_cast<std::size_t>(S)) throw ConfigError("gamma1 needs one entry per generator");
  const int vars = q(0, 0).vars();
  const int K = std::min(q(0, 0).order(), gamma(0).order());
  if (K < 1) throw OrderError("gauge variation needs jets of order >= 1");
  JetTensor dq({d, S}, Jet(vars, K - 1));
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < S; ++a) {
      Jet r = gamma(a).derivative(mu);
      for (int b = 0; b < S; ++b)
        for (int c = 0; c < S; ++c) {
          const double f = L.at(b, c, a);
          if (f != 0.0) r -= (gamma(b) * q(mu, c)) * f;
        }
      dq(mu, a) = r;
    }
  return dq;
}

RealTensor gauge_variation(const GaugeLevel1& f, const LieStructure& L, std::span<const double> u) {
  if (f.gamma1.empty()) throw ConfigError("gauge variation needs gamma1");
  GaugeJets g = gauge_jets(f, u, 1);
  return values(gauge_variation_jets(g.q, g.gamma, L));
}

namespace {

void check_theta(const ThetaMatrix& th, int d) {
  if (th.size() != d) throw ConfigError("theta must be " + std::to_string(d) + " x " + std::to_string(d));
}

}  // namespace

GaugeLevel2 sw_expand(const GaugeJets& f, const ThetaMatrix& th, const LieStructure& L) {
  const int d = f.dim(), S = f.S();
  check_theta(th, d);
  const RealTensor R = values(gauge_curvature_jets(f.q, L));
  RealTensor q({d, S});
  RealTensor dq({d, d, S});  // dq(tau, mu, b) = d_tau q_mu,b
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < S; ++a) {
      q(mu, a) = f.q(mu, a).value();
      for (int t = 0; t < d; ++t) dq(t, mu, a) = f.q(mu, a).d1(t);
    }
  GaugeLevel2 out;
  out.q2 = RealTensor({d, S, S});
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) {
        double s = 0.0;
        for (int nu = 0; nu < d; ++nu)
          for (int t = 0; t < d; ++t) {
            const double w = th.theta(nu, t);
            if (w == 0.0) continue;
            s += w * (q(nu, a) * (dq(t, mu, b) + R(t, mu, b)) + q(nu, b) * (dq(t, mu, a) + R(t, mu, a)));
          }
        out.q2(mu, a, b) = -0.25 * s;
      }
  if (f.gamma.size() > 0) {
    out.gamma2 = RealTensor({S, S});
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b) {
        double s = 0.0;
        for (int nu = 0; nu < d; ++nu)
          for (int mu = 0; mu < d; ++mu)
            s += th.theta(nu, mu) * (f.gamma(a).d1(nu) * q(mu, b) + f.gamma(b).d1(nu) * q(mu, a));
        out.gamma2(a, b) = 0.25 * s;
      }
  }
  return out;
}

GaugeLevel2 sw_expand(const GaugeLevel1& f, const ThetaMatrix& th, const LieStructure& L,
                      std::span<const double> u) {
  return sw_expand(gauge_jets(f, u, 2), th, L);
}

CorrectedCurvature corrected_curvature(const GaugeJets& f, const ThetaMatrix& th, const LieStructure& L) {
  const int d = f.dim(), S = f.S();
  check_theta(th, d);
  if (f.q(0, 0).order() < 2) throw OrderError("corrected curvature needs q1 jets of order >= 2");
  const JetTensor Rj = gauge_curvature_jets(f.q, L);
  CorrectedCurvature out;
  out.R1 = values(Rj);
  out.R2 = RealTensor({d, d, S, S});
  // D_nu R_tl,b + d_nu R_tl,b = 2 d_nu R_tl,b + q_nu,c R_tl,d f^{cd}_b
  auto DR = [&](int nu, int t, int l, int b) {
    double s = 2.0 * Rj(t, l, b).d1(nu);
    for (int c = 0; c < S; ++c)
      for (int e = 0; e < S; ++e) {
        const double fv = L.at(c, e, b);
        if (fv != 0.0) s += f.q(nu, c).value() * out.R1(t, l, e) * fv;
      }
    return s;
  };
  for (int t = 0; t < d; ++t)
    for (int l = 0; l < d; ++l) {
      // raw(a, b), symmetrized afterwards
      Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(S, S);
      for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
          const double w = th.theta(mu, nu);
          if (w == 0.0) continue;
          for (int b = 0; b < S; ++b) {
            const double dr = DR(nu, t, l, b);
            for (int a = 0; a < S; ++a)
              raw(a, b) += w * (out.R1(t, mu, a) * out.R1(l, nu, b) - 0.5 * f.q(mu, a).value() * dr);
          }
        }
      for (int a = 0; a < S; ++a)
        for (int b = 0; b < S; ++b) out.R2(t, l, a, b) = 0.5 * (raw(a, b) + raw(b, a));
    }
  return out;
}

CorrectedCurvature corrected_curvature(const GaugeLevel1& f, const ThetaMatrix& th, const LieStructure& L,
                                       std::span<const double> u) {
  return corrected_curvature(gauge_jets(f, u, 2), th, L);
}

// ---- matrix representation ---------------------------------------------------

double GaugeRepresentation::bracket_residual() const {
  double worst = 0.0;
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b) {
      Eigen::MatrixXcd r = I[a] * I[b] - I[b] * I[a];
      for (int c = 0; c < L.dim; ++c) r -= kI * L.at(a, b, c) * I[c];
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  return worst;
}

GaugeRepresentation GaugeRepresentation::desitter(const DeSitterAlgebra& A) {
  GaugeRepresentation r;
  r.L = A.structure;
  for (const auto& T : A.T) r.I.push_back(kI * T.cast<cdouble>());
  return r;
}

GaugeRepresentation GaugeRepresentation::su2() {
  GaugeRepresentation r;
  r.L = LieStructure::su2();
  Eigen::MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;
  r.I = {0.5 * s1, 0.5 * s2, 0.5 * s3};
  return r;
}

Eigen::MatrixXcd envelope(const GaugeRepresentation& rep, const std::vector<double>& c1,
                          const std::vector<double>& c2) {
  const int S = rep.L.dim, D = rep.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
  for (int a = 0; a < S && a < static_cast<int>(c1.size()); ++a) m += c1[a] * rep.I[a];
  if (!c2.empty())
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b)
        if (c2[a * S + b] != 0.0) m += c2[a * S + b] * (rep.I[a] * rep.I[b]);
  return m;
}

namespace {

// Square matrix of complex jets; D == 0 stands for the zero matrix.
struct MJ {
  int D = 0;
  std::vector<CJet> e;
  bool zero() const { return D == 0; }
  CJet& at(int r, int c) { return e[r * D + c]; }
  const CJet& at(int r, int c) const { return e[r * D + c]; }
};

MJ mj_add(const MJ& a, const MJ& b, double sb = 1.0) {
  if (b.zero()) return a;
  if (a.zero()) {
    MJ r = b;
    if (sb != 1.0)
      for (auto& x : r.e) x *= sb;
    return r;
  }
  MJ r = a;
  for (std::size_t i = 0; i < r.e.size(); ++i) {
    if (sb == 1.0)
      r.e[i] += b.e[i];
    else
      r.e[i] += b.e[i] * sb;
  }
  return r;
}

MJ mj_scale(const MJ& a, cdouble s) {
  if (a.zero()) return a;
  MJ r = a;
  for (auto& x : r.e) x = x.rmul(s);
  return r;
}

MJ mj_mul(const MJ& a, const MJ& b) {
  if (a.zero() || b.zero()) return {};
  const int D = a.D;
  const int d = a.e[0].vars();
  const int K = std::min(a.e[0].order(), b.e[0].order());
  MJ r{D, std::vector<CJet>(D * D, CJet(d, K))};
  for (int i = 0; i < D; ++i)
    for (int k = 0; k < D; ++k) {
      const CJet& x = a.at(i, k);
      bool nz = false;
      for (const auto& c : x.coeffs())
        if (c != 0.0) {
          nz = true;
          break;
        }
      if (!nz) continue;
      for (int j = 0; j < D; ++j) r.at(i, j) += x * b.at(k, j);
    }
  return r;
}

MJ mj_deriv(const MJ& a, int v) {
  if (a.zero()) return a;
  MJ r{a.D, {}};
  r.e.reserve(a.e.size());
  for (const auto& x : a.e) r.e.push_back(x.derivative(v));
  return r;
}

// Polynomial in (theta, eps) truncated at theta^P and eps^1, coefficients MJ.
struct Series {
  int P = 1;
  std::vector<MJ> c;  // c[p * 2 + e]
  explicit Series(int p = 1) : P(p), c(2 * (p + 1)) {}
  MJ& at(int p, int e) { return c[p * 2 + e]; }
  const MJ& at(int p, int e) const { return c[p * 2 + e]; }
};

Series s_add(const Series& a, const Series& b, double sb = 1.0) {
  Series r(a.P);
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = mj_add(a.c[i], b.c[i], sb);
  return r;
}

Series s_scale(const Series& a, cdouble s) {
  Series r(a.P);
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = mj_scale(a.c[i], s);
  return r;
}

Series s_mul(const Series& a, const Series& b, int shift = 0) {
  Series r(a.P);
  for (int pa = 0; pa <= a.P; ++pa)
    for (int ea = 0; ea < 2; ++ea) {
      if (a.at(pa, ea).zero()) continue;
      for (int pb = 0; pa + pb + shift <= a.P; ++pb)
        for (int eb = 0; ea + eb < 2; ++eb) {
          if (b.at(pb, eb).zero()) continue;
          MJ& dst = r.at(pa + pb + shift, ea + eb);
          dst = mj_add(dst, mj_mul(a.at(pa, ea), b.at(pb, eb)));
        }
    }
  return r;
}

Series s_deriv(const Series& a, int v) {
  Series r(a.P);
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = mj_deriv(a.c[i], v);
  return r;
}

// Multiplies by one power of theta.
Series s_shift(const Series& a) {
  Series r(a.P);
  for (int p = 0; p < a.P; ++p)
    for (int e = 0; e < 2; ++e) r.at(p + 1, e) = a.at(p, e);
  return r;
}

Series s_eps0(const Series& a) {
  Series r(a.P);
  for (int p = 0; p <= a.P; ++p) r.at(p, 0) = a.at(p, 0);
  return r;
}

Series s_from(const MJ& m, int P, int e = 0) {
  Series r(P);
  r.at(0, e) = m;
  return r;
}

Series s_anti(const Series& a, const Series& b) { return s_add(s_mul(a, b), s_mul(b, a)); }
Series s_comm(const Series& a, const Series& b) { return s_add(s_mul(a, b), s_mul(b, a), -1.0); }

// First-order Moyal product: f g + (i/2) theta^{ij} d_i f d_j g.
Series s_star(const Series& a, const Series& b, const Eigen::MatrixXd& th) {
  Series r = s_mul(a, b);
  const int d = static_cast<int>(th.rows());
  for (int i = 0; i < d; ++i) {
    Series tb(a.P);
    bool any = false;
    for (int j = 0; j < d; ++j)
      if (th(i, j) != 0.0) {
        tb = s_add(tb, s_deriv(b, j), th(i, j));
        any = true;
      }
    if (!any) continue;
    r = s_add(r, s_scale(s_mul(s_deriv(a, i), tb, 1), 0.5 * kI));
  }
  return r;
}

Series s_star_comm(const Series& a, const Series& b, const Eigen::MatrixXd& th) {
  return s_add(s_star(a, b, th), s_star(b, a, th), -1.0);
}

MJ lift(const GaugeRepresentation& rep, const std::vector<const Jet*>& c) {
  const int D = rep.size();
  const int d = c[0]->vars();
  int K = kMaxJetOrder;
  for (const Jet* j : c) K = std::min(K, j->order());
  MJ m{D, std::vector<CJet>(D * D, CJet(d, K))};
  for (std::size_t a = 0; a < c.size(); ++a) {
    CJet x = to_complex(c[a]->truncate(K));
    for (int r = 0; r < D; ++r)
      for (int s = 0; s < D; ++s) {
        const cdouble v = rep.I[a](r, s);
        if (v != 0.0) m.at(r, s) += x.rmul(v);
      }
  }
  return m;
}

MJ lift_row(const GaugeRepresentation& rep, const JetTensor& q, int mu) {
  std::vector<const Jet*> c;
  for (int a = 0; a < q.dim(1); ++a) c.push_back(&q(mu, a));
  return lift(rep, c);
}

MJ lift_vec(const GaugeRepresentation& rep, const JetTensor& g) {
  std::vector<const Jet*> c;
  for (std::size_t a = 0; a < g.size(); ++a) c.push_back(&g(static_cast<int>(a)));
  return lift(rep, c);
}

struct SwFields {
  int d = 0;
  std::vector<Series> A;                // A_mu
  std::vector<std::vector<Series>> F;   // F_tau mu
};

SwFields fields(const std::vector<Series>& A) {
  SwFields f;
  f.d = static_cast<int>(A.size());
  f.A = A;
  f.F.assign(f.d, std::vector<Series>(f.d, Series(A[0].P)));
  for (int t = 0; t < f.d; ++t)
    for (int m = t + 1; m < f.d; ++m) {
      Series r = s_add(s_deriv(A[m], t), s_deriv(A[t], m), -1.0);
      r = s_add(r, s_scale(s_comm(A[t], A[m]), -kI));
      f.F[t][m] = r;
      f.F[m][t] = s_scale(r, -1.0);
    }
  return f;
}

// A^_mu = A_mu - 1/4 theta^{nu tau} {A_nu, d_tau A_mu + F_tau mu}
Series sw_potential(const SwFields& f, const Eigen::MatrixXd& th, int mu) {
  Series acc(f.A[0].P);
  for (int nu = 0; nu < f.d; ++nu)
    for (int t = 0; t < f.d; ++t) {
      if (th(nu, t) == 0.0) continue;
      Series inner = s_add(s_deriv(f.A[mu], t), f.F[t][mu]);
      acc = s_add(acc, s_anti(f.A[nu], inner), th(nu, t));
    }
  return s_add(f.A[mu], s_shift(acc), -0.25);
}

// Gamma^ = alpha + 1/4 theta^{nu mu} {d_nu alpha, A_mu}
Series sw_parameter(const Series& alpha, const SwFields& f, const Eigen::MatrixXd& th) {
  Series acc(alpha.P);
  for (int nu = 0; nu < f.d; ++nu) {
    Series da = s_deriv(alpha, nu);
    for (int mu = 0; mu < f.d; ++mu) {
      if (th(nu, mu) == 0.0) continue;
      acc = s_add(acc, s_anti(da, f.A[mu]), th(nu, mu));
    }
  }
  return s_add(alpha, s_shift(acc), 0.25);
}

// F^_tl = F_tl + 1/4 theta^{kl} (2{F_tk, F_ll} - {A_k, D_l F_tl + d_l F_tl})
Series sw_curvature(const SwFields& f, const Eigen::MatrixXd& th, int t, int l) {
  Series acc(f.A[0].P);
  const Series& Ftl = f.F[t][l];
  for (int k = 0; k < f.d; ++k)
    for (int m = 0; m < f.d; ++m) {
      if (th(k, m) == 0.0) continue;
      Series dF = s_deriv(Ftl, m);
      Series DF = s_add(dF, s_scale(s_comm(f.A[m], Ftl), -kI));
      Series term = s_add(s_scale(s_anti(f.F[t][k], f.F[l][m]), 2.0), s_anti(f.A[k], s_add(DF, dF)), -1.0);
      acc = s_add(acc, term, th(k, m));
    }
  return s_add(Ftl, s_shift(acc), 0.25);
}

// i[alpha, A_mu] + d_mu alpha, commutative
MJ commutative_variation(const MJ& alpha, const MJ& A, int mu) {
  MJ c = mj_add(mj_mul(alpha, A), mj_mul(A, alpha), -1.0);
  return mj_add(mj_deriv(alpha, mu), mj_scale(c, kI));
}

std::vector<Series> potential_series(const GaugeRepresentation& rep, const JetTensor& q, int P,
                                     const MJ* alpha) {
  std::vector<Series> A;
  for (int mu = 0; mu < q.dim(0); ++mu) {
    MJ a = lift_row(rep, q, mu);
    Series s = s_from(a, P);
    if (alpha) s.at(0, 1) = commutative_variation(*alpha, a, mu);
    A.push_back(s);
  }
  return A;
}

double slot_max(const MJ& m) {
  if (m.zero()) return 0.0;
  double w = 0.0;
  for (const auto& x : m.e) w = std::max(w, std::abs(x.value()));
  return w;
}

void check_rep(const GaugeJets& f, const GaugeRepresentation& rep, const ThetaMatrix& th) {
  if (f.S() != rep.L.dim) throw ConfigError("representation and gauge field disagree on S");
  check_theta(th, f.dim());
}

}  // namespace

SwResidual sw_residual(const GaugeJets& f, const ThetaMatrix& th, const GaugeRepresentation& rep,
                       const std::vector<double>& scales) {
  check_rep(f, rep, th);
  if (f.gamma.size() == 0) throw ConfigError("sw residual needs gamma1");
  if (f.q(0, 0).order() < 3 || f.gamma(0).order() < 3)
    throw OrderError("sw residual needs jets of order >= 3");
  const int P = 3;
  const MJ alpha = lift_vec(rep, f.gamma);
  SwFields F = fields(potential_series(rep, f.q, P, &alpha));
  Series a = s_from(alpha, P);
  Series lam = s_eps0(sw_parameter(a, F, th.theta));
  const int d = f.dim(), D = rep.size();
  // residual coefficient matrices per theta power
  std::vector<std::vector<Eigen::MatrixXcd>> coef(P + 1, std::vector<Eigen::MatrixXcd>(d));
  for (int mu = 0; mu < d; ++mu) {
    Series Ahat = sw_potential(F, th.theta, mu);
    Series rhs = s_add(s_deriv(lam, mu), s_scale(s_star_comm(lam, s_eps0(Ahat), th.theta), kI));
    for (int p = 0; p <= P; ++p) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
      const MJ& l = Ahat.at(p, 1);
      const MJ& r = rhs.at(p, 0);
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
          if (!l.zero()) m(i, j) += l.at(i, j).value();
          if (!r.zero()) m(i, j) -= r.at(i, j).value();
        }
      coef[p][mu] = m;
    }
  }
  SwResidual out;
  out.scales = scales;
  for (int mu = 0; mu < d; ++mu) {
    out.order0 = std::max(out.order0, coef[0][mu].cwiseAbs().maxCoeff());
    out.order1 = std::max(out.order1, coef[1][mu].cwiseAbs().maxCoeff());
  }
  for (double s : scales) {
    double w = 0.0;
    for (int mu = 0; mu < d; ++mu) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
      double sp = 1.0;
      for (int p = 0; p <= P; ++p, sp *= s) m += sp * coef[p][mu];
      w = std::max(w, m.cwiseAbs().maxCoeff());
    }
    out.residuals.push_back(w);
  }
  if (scales.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) {
      const double x = std::log(scales[i]), y = std::log(std::max(out.residuals[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

ClosureResidual closure_check(const JetTensor& q, const JetTensor& gamma, const JetTensor& varsigma,
                              const ThetaMatrix& th, const GaugeRepresentation& rep) {
  const LieStructure& L = rep.L;
  const int d = q.dim(0), S = q.dim(1);
  check_theta(th, d);
  if (S != L.dim || gamma.size() != std::size_t(S) || varsigma.size() != std::size_t(S))
    throw ConfigError("closure check: generator counts disagree");
  ClosureResidual out;
  // level 1: [d_g, d_s] q = d_{lambda} q, lambda_a = -f^{bc}_a s_b g_c
  {
    JetTensor dg = gauge_variation_jets(q, gamma, L);
    JetTensor ds = gauge_variation_jets(q, varsigma, L);
    JetTensor lam({S});
    const int vars = q(0, 0).vars();
    const int K = std::min(gamma(0).order(), varsigma(0).order());
    for (int a = 0; a < S; ++a) {
      Jet s(vars, K);
      for (int b = 0; b < S; ++b)
        for (int c = 0; c < S; ++c)
          if (L.at(b, c, a) != 0.0) s -= (varsigma(b) * gamma(c)) * L.at(b, c, a);
      lam(a) = s;
    }
    JetTensor dl = gauge_variation_jets(q, lam, L);
    for (int mu = 0; mu < d; ++mu)
      for (int a = 0; a < S; ++a) {
        // d_g (d_s q) = -f s (d_g q)
        double v = 0.0;
        for (int b = 0; b < S; ++b)
          for (int c = 0; c < S; ++c) {
            const double f = L.at(b, c, a);
            if (f == 0.0) continue;
            v += -f * varsigma(b).value() * dg(mu, c).value() + f * gamma(b).value() * ds(mu, c).value();
          }
        out.level1 = std::max(out.level1, std::abs(v - dl(mu, a).value()));
      }
  }
  // order theta: enveloping parameters
  const int P = 1;
  const MJ g = lift_vec(rep, gamma), s = lift_vec(rep, varsigma);
  MJ lam = mj_scale(mj_add(mj_mul(s, g), mj_mul(g, s), -1.0), kI);
  SwFields Fg = fields(potential_series(rep, q, P, &g));
  SwFields Fs = fields(potential_series(rep, q, P, &s));
  Series Ls_g = sw_parameter(s_from(s, P), Fg, th.theta);  // eps part: delta_g Lambda_s
  Series Lg_s = sw_parameter(s_from(g, P), Fs, th.theta);
  Series Ls = s_eps0(Ls_g), Lg = s_eps0(Lg_s);
  Series Ll = s_eps0(sw_parameter(s_from(lam, P), Fg, th.theta));
  const int D = rep.size();
  for (int p = 0; p <= P; ++p) {
    Series sc = s_star_comm(Ls, Lg, th.theta);
    const MJ* parts[4] = {&Ls_g.at(p, 1), &Lg_s.at(p, 1), &sc.at(p, 0), &Ll.at(p, 0)};
    const cdouble w[4] = {1.0, -1.0, kI, -1.0};
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        cdouble v = 0.0;
        for (int k = 0; k < 4; ++k)
          if (!parts[k]->zero()) v += w[k] * parts[k]->at(i, j).value();
        out.order_theta = std::max(out.order_theta, std::abs(v));
      }
  }
  return out;
}

double covariance_residual(const GaugeJets& f, const ThetaMatrix& th, const GaugeRepresentation& rep) {
  check_rep(f, rep, th);
  if (f.gamma.size() == 0) throw ConfigError("covariance check needs gamma1");
  if (f.q(0, 0).order() < 3 || f.gamma(0).order() < 3)
    throw OrderError("covariance check needs jets of order >= 3");
  const int P = 1, d = f.dim();
  const MJ alpha = lift_vec(rep, f.gamma);
  SwFields F = fields(potential_series(rep, f.q, P, &alpha));
  Series lam = s_eps0(sw_parameter(s_from(alpha, P), F, th.theta));
  double worst = 0.0;
  for (int t = 0; t < d; ++t)
    for (int l = t + 1; l < d; ++l) {
      Series R = sw_curvature(F, th.theta, t, l);
      Series rhs = s_scale(s_star_comm(lam, s_eps0(R), th.theta), kI);
      for (int p = 0; p <= P; ++p) {
        MJ diff = mj_add(R.at(p, 1), rhs.at(p, 0), -1.0);
        worst = std::max(worst, slot_max(diff));
      }
    }
  return worst;
}

std::vector<Eigen::MatrixXcd> corrected_curvature_matrix(const GaugeJets& f, const ThetaMatrix& th,
                                                         const GaugeRepresentation& rep, int tau,
                                                         int lambda) {
  check_rep(f, rep, th);
  SwFields F = fields(potential_series(rep, f.q, 1, nullptr));
  Series R = sw_curvature(F, th.theta, tau, lambda);
  std::vector<Eigen::MatrixXcd> out;
  const int D = rep.size();
  for (int p = 0; p <= 1; ++p) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
    const MJ& x = R.at(p, 0);
    if (!x.zero())
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m(i, j) = x.at(i, j).value();
    out.push_back(m);
  }
  return out;
}

// ---- Lagrangian ----------------------------------------------------------------

GaugeStrength gauge_strength(const GeometrySource& src, const ConnectionSelector& sel,
                             std::span<const double> u) {
  GeometryJets G = src.jets(u, 2);
  const int d = G.shape.dim();
  const Eigen::MatrixXd g = value_matrix(G.g), h = value_matrix(G.h);
  const Eigen::MatrixXd E = vielbein(g, h).full();
  JetTensor Gam = connection_jets(G, sel);
  JetTensor W = anholonomy_jets(G);
  TorsionPoint tp = torsion_from(values(Gam), values(W), G.shape);
  CurvaturePoint cp = curvature_point(values(curvature_jets(G, Gam, W)), G.shape);
  RicciPoint rp = ricci_scalar(cp, G);
  const Eigen::MatrixXd Einv = E.inverse();
  GaugeStrength s;
  s.dim = d;
  s.T = RealTensor({d, d, d});
  s.R = RealTensor({d, d, d, d});
  for (int a = 0; a < d; ++a)
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        double t = 0.0;
        for (int al = 0; al < d; ++al) t += E(al, a) * tp.T(al, m, n);
        s.T(a, m, n) = t;
        for (int b = 0; b < d; ++b) {
          double r = 0.0;
          for (int al = 0; al < d; ++al)
            for (int be = 0; be < d; ++be) r += E(al, a) * cp.R(al, be, m, n) * Einv(b, be);
          s.R(a, b, m, n) = r;
        }
      }
  s.scalar = rp.total;
  s.Ginv = Eigen::MatrixXd::Zero(d, d);
  s.Ginv.topLeftCorner(G.shape.n, G.shape.n) = g.inverse();
  s.Ginv.bottomRightCorner(G.shape.m, G.shape.m) = h.inverse();
  s.sqrt_G = std::sqrt(std::abs(g.determinant() * h.determinant()));
  return s;
}

double lagrangian_density(const GaugeStrength& s, const GaugeConstants& C) {
  const int d = s.dim;
  const Eigen::MatrixXd& Gi = s.Ginv;
  double TT = 0.0, RR = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int r = 0; r < d; ++r)
        for (int q = 0; q < d; ++q) {
          const double w = Gi(m, r) * Gi(n, q);
          if (w == 0.0) continue;
          for (int a = 0; a < d; ++a) {
            TT += w * s.T(a, m, n) * s.T(a, r, q);
            for (int b = 0; b < d; ++b) RR += w * s.R(a, b, m, n) * s.R(b, a, r, q);
          }
        }
  const double l2 = C.l2();
  return (TT / (2.0 * l2) + RR / (8.0 * C.lambda) - (s.scalar - 2.0 * C.lambda1()) / l2) * s.sqrt_G;
}

// ---- bridge ----------------------------------------------------------------------

BridgeReport gauge_geometry_bridge(const GeometrySource& src, const ConnectionSelector& sel, double l0,
                                   std::span<const double> u) {
  const BundleShape sh = src.shape();
  if (sh.dim() != 4) throw ConfigError("the de Sitter bridge needs n + m = 4");
  if (!(l0 > 0.0)) throw ConfigError("l0 must be positive");
  const int d = 4, n = sh.n;
  GeometryJets G = src.jets(u, 2);
  SpinJets sp = spin_jets(G, sel);
  const DeSitterAlgebra alg = desitter_algebra({1, 1, 1, 1, -1}, 1.0);
  const int S = static_cast<int>(alg.T.size());
  const int vars = d;

  // Bordered potential per adapted direction, as jets of order 1.
  auto entry = [&](int r, int c, int mu) -> Jet {
    if (r < 4 && c < 4) return sp.omega(r, c, mu);
    if (r < 4 && c == 4) return sp.E(mu, r).truncate(1) * (1.0 / l0);
    if (r == 4 && c < 4) return sp.E(mu, c).truncate(1) * (1.0 / l0);
    return Jet(vars, 1);
  };
  BridgeReport rep;
  JetTensor qa({d, S}, Jet(vars, 1));  // adapted components
  for (int mu = 0; mu < d; ++mu) {
    Eigen::MatrixXd val(5, 5);
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) val(r, c) = entry(r, c, mu).value();
    rep.projection_residual =
        std::max(rep.projection_residual, (combine(alg.T, project(alg.T, val)) - val).cwiseAbs().maxCoeff());
    for (int s = 0; s < S; ++s) {
      Jet acc(vars, 1);
      const double nrm = alg.T[s].squaredNorm();
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c)
          if (alg.T[s](r, c) != 0.0) acc += entry(r, c, mu) * (alg.T[s](r, c) / nrm);
      qa(mu, s) = acc;
    }
  }
  // Coordinate components: A_i dx^i + A_a (dy^a + N_i^a dx^i).
  JetTensor qc = qa;
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < sh.m; ++a) qc(i, s) += G.N(a, i).truncate(1) * qa(n + a, s);
  RealTensor R1 = values(gauge_curvature_jets(qc, alg.structure));

  // Frame e(rho, alpha): coordinate components of the adapted vectors.
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < sh.m; ++a) e(n + a, i) = -G.N(a, i).value();
  std::vector<std::vector<Eigen::MatrixXd>> Fc(d, std::vector<Eigen::MatrixXd>(d));
  for (int t = 0; t < d; ++t)
    for (int m = 0; m < d; ++m) {
      std::vector<double> c(S);
      for (int s = 0; s < S; ++s) c[s] = R1(t, m, s);
      Fc[t][m] = combine(alg.T, c);
    }
  rep.gauge_F = RealTensor({d, d, d, d});
  rep.gauge_T = RealTensor({d, d, d});
  for (int al = 0; al < d; ++al)
    for (int be = 0; be < d; ++be) {
      Eigen::MatrixXd F = Eigen::MatrixXd::Zero(5, 5);
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
          if (e(r, al) != 0.0 && e(s, be) != 0.0) F += e(r, al) * e(s, be) * Fc[r][s];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) rep.gauge_F(a, b, al, be) = F(a, b);
        rep.gauge_T(a, al, be) = F(a, 4);
      }
    }

  // Geometry side.
  JetTensor W = anholonomy_jets(G);
  RealTensor Rg = values(curvature_jets(G, sp.Gamma, W));
  TorsionPoint tp = torsion_from(values(sp.Gamma), values(W), sh);
  const RealTensor E = values(sp.E), Einv = values(sp.Einv);
  rep.geometry_F = RealTensor({d, d, d, d});
  rep.geometry_T = RealTensor({d, d, d});
  const double k = 1.0 / (l0 * l0);
  for (int a = 0; a < d; ++a)
    for (int m = 0; m < d; ++m)
      for (int v = 0; v < d; ++v) {
        double t = 0.0;
        for (int al = 0; al < d; ++al) t += E(al, a) * tp.T(al, m, v);
        rep.geometry_T(a, m, v) = -t / l0;
        for (int b = 0; b < d; ++b) {
          double r = 0.0;
          for (int al = 0; al < d; ++al)
            for (int be = 0; be < d; ++be) r += E(al, a) * Rg(al, be, v, m) * Einv(b, be);
          rep.geometry_F(a, b, m, v) = r + k * (E(m, a) * E(v, b) - E(v, a) * E(m, b));
        }
      }
  rep.curvature_residual = max_abs_diff(rep.gauge_F, rep.geometry_F);
  rep.torsion_residual = max_abs_diff(rep.gauge_T, rep.geometry_T);
  return rep;
}

}  // namespace dgeom
