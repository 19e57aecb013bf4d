#include "dgeom/finsler.hpp"

#include <sstream>

#include "dgeom/jet_linalg.hpp"

namespace dgeom {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> parse_matrix_spec(const std::string& spec, int n,
                                                        const char* what) {
  auto rows = split(spec, ';');
  if (static_cast<int>(rows.size()) != n)
    throw ConfigError(std::string(what) + " needs " + std::to_string(n) + " rows");
  std::vector<std::vector<std::string>> m;
  for (const auto& r : rows) {
    m.push_back(split(r, ','));
    if (static_cast<int>(m.back().size()) != n)
      throw ConfigError(std::string(what) + " rows need " + std::to_string(n) + " entries");
  }
  return m;
}

std::string yv(int i) { return "y" + std::to_string(i + 1); }
std::string xv(int i) { return "x" + std::to_string(i + 1); }

std::string quadratic_form(const std::vector<std::vector<std::string>>& a, int n) {
  std::string s;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!s.empty()) s += " + ";
      s += "(" + a[i][j] + ")*" + yv(i) + "*" + yv(j);
    }
  return s;
}

std::vector<std::vector<std::string>> default_riemann(int n) {
  std::vector<std::vector<std::string>> g(n, std::vector<std::string>(n, "0"));
  for (int i = 0; i < n; ++i) g[i][i] = "1+0.5*" + xv(i) + "^2";
  if (n >= 2) g[0][1] = g[1][0] = "0.2*x1*x2";
  return g;
}

}  // namespace

FinslerFunction FinslerFunction::from_expr(const std::string& F, int n) {
  BundleShape s{n, n};
  validate(s);
  ScalarField f = parse_field(F, s);
  return FinslerFunction(F, f, parse_field("(" + f.to_string() + ")^2", s));
}

FinslerFunction FinslerFunction::builtin(const std::string& id, int n) {
  BundleShape s{n, n};
  validate(s);
  const auto colon = id.find(':');
  const std::string kind = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  auto make = [&](const std::string& F, const std::string& F2) {
    return FinslerFunction(id, parse_field(F, s), parse_field(F2, s));
  };
  if (kind == "euclidean") {
    std::string q;
    for (int i = 0; i < n; ++i) q += (i ? " + " : "") + yv(i) + "^2";
    return make("sqrt(" + q + ")", q);
  }
  if (kind == "riemann") {
    auto g = arg.empty() ? default_riemann(n) : parse_matrix_spec(arg, n, "riemann metric");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (parse_field(g[i][j], s).to_string() != parse_field(g[j][i], s).to_string())
          throw ConfigError("riemann metric is not symmetric");
    std::string q = quadratic_form(g, n);
    return make("sqrt(" + q + ")", q);
  }
  if (kind == "quartic") {
    if (!arg.empty()) throw ConfigError("quartic takes no parameters");
    std::string q;
    for (int i = 0; i < n; ++i) q += (i ? " + " : "") + ("(1+0.25*" + xv(i) + "^2)*" + yv(i) + "^4");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) q += " + 0.5*" + yv(i) + "^2*" + yv(j) + "^2";
    return make("sqrt(sqrt(" + q + "))", "sqrt(" + q + ")");
  }
  if (kind == "randers") {
    std::vector<std::vector<std::string>> a(n, std::vector<std::string>(n, "0"));
    for (int i = 0; i < n; ++i) a[i][i] = "1";
    std::vector<std::string> b(n, "0");
    b[0] = "0.3*sin(x1)";
    if (n >= 2) b[1] = "0.2*x2";
    if (!arg.empty()) {
      auto parts = split(arg, '|');
      if (parts.size() != 2) throw ConfigError("randers spec is '<a rows>|<b entries>'");
      a = parse_matrix_spec(parts[0], n, "randers a");
      b = split(parts[1], ',');
      if (static_cast<int>(b.size()) != n) throw ConfigError("randers b needs n entries");
    }
    std::string F = "sqrt(" + quadratic_form(a, n) + ")";
    for (int i = 0; i < n; ++i) F += " + (" + b[i] + ")*" + yv(i);
    return make(F, "(" + F + ")^2");
  }
  throw ConfigError("unknown Finsler builtin '" + kind + "'");
}

double FinslerFunction::value(std::span<const double> u) const { return F_.eval(u); }

Jet FinslerFunction::F2_jet(std::span<const double> u, int order) const {
  const int n = this->n();
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += u[n + i] * u[n + i];
  if (std::sqrt(r2) < kZeroSection) throw DomainError("Finsler function evaluated on the zero section");
  return F2_.eval_jet(u, order);
}

JetTensor half_y_hessian(const Jet& L, int n) {
  JetTensor g({n, n}, Jet(L.vars(), L.order() - 2));
  for (int i = 0; i < n; ++i) {
    Jet di = L.derivative(n + i);
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = di.derivative(n + j) * 0.5;
  }
  return g;
}

JetTensor cartan_jets(const Jet& F2, int n, std::span<const double> u) {
  const int d = F2.vars();
  const int K = F2.order() - 4;
  if (K < 0) throw OrderError("Cartan N-connection needs F^2 jets of order >= 4");
  JetTensor g = half_y_hessian(F2, n);
  JetTensor ginv = inverse(g, "Finsler metric");
  // dg(j, k, l) = d g_jk / dx^l
  JetTensor dg({n, n, n}, Jet(d, K + 1));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) dg(j, k, l) = g(j, k).derivative(l);
  std::vector<Jet> y;
  for (int l = 0; l < n; ++l) y.push_back(Jet::variable(d, K + 1, n + l, u[n + l]));
  JetTensor N({n, n}, Jet(d, K));
  for (int i = 0; i < n; ++i) {
    // spray-like S^i = c^i_lk y^l y^k
    Jet S(d, K + 1);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k) {
        Jet c(d, K + 1);
        for (int j = 0; j < n; ++j) c += ginv(i, j) * (dg(j, k, l) + dg(j, l, k) - dg(l, k, j));
        S += c * (y[l] * y[k]);
      }
    S *= 0.5;
    for (int j = 0; j < n; ++j) N(i, j) = S.derivative(n + j) * 0.5;
  }
  return N;
}

namespace {

FinslerMetricPoint metric_point(const Eigen::MatrixXd& g) {
  FinslerMetricPoint p;
  p.g = g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const auto& ev = es.eigenvalues();
  p.min_eigenvalue = ev.minCoeff();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol) ++p.rank;
  return p;
}

}  // namespace

FinslerMetricPoint finsler_metric(const FinslerFunction& F, std::span<const double> u) {
  return metric_point(value_matrix(half_y_hessian(F.F2_jet(u, 2), F.n())));
}

FinslerMetricPoint lagrange_metric(const ScalarField& L, std::span<const double> u) {
  if (L.shape().n != L.shape().m) throw ConfigError("a Lagrangian lives on a bundle with m = n");
  return metric_point(value_matrix(half_y_hessian(L.eval_jet(u, 2), L.shape().n)));
}

Eigen::MatrixXd cartan_nconnection(const FinslerFunction& F, std::span<const double> u) {
  return value_matrix(cartan_jets(F.F2_jet(u, 4), F.n(), u));
}

double homogeneity_residual(const FinslerFunction& F, std::span<const double> u) {
  const int n = F.n();
  const double f = F.value(u);
  double worst = 0.0;
  for (double s : {0.5, 2.0, 3.0}) {
    std::vector<double> v(u.begin(), u.end());
    for (int i = 0; i < n; ++i) v[n + i] *= s;
    worst = std::max(worst, std::abs(F.value(v) - s * f));
  }
  return worst;
}

double kahler_form_closure(const FinslerFunction& F, std::span<const double> u) {
  const int n = F.n(), d = 2 * n;
  Jet F2 = F.F2_jet(u, 5);
  JetTensor g = truncate(half_y_hessian(F2, n), 1);
  JetTensor N = cartan_jets(F2, n, u);
  // theta = 1/2 w_{mu nu} du^mu ^ du^nu
  JetTensor w({d, d}, Jet(d, 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      w(n + i, j) = g(i, j);
      w(j, n + i) = -g(i, j);
    }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      Jet s(d, 1);
      for (int i = 0; i < n; ++i) s += g(i, j) * N(i, k) - g(i, k) * N(i, j);
      w(k, j) = s;
    }
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int c = b + 1; c < d; ++c) {
        double r = w(b, c).d1(a) + w(c, a).d1(b) + w(a, b).d1(c);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

Eigen::MatrixXd almost_complex_structure(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

GeometryJets FinslerGeometry::jets(std::span<const double> u, int order) const {
  if (order > max_order()) throw OrderError("Finsler geometry jets are limited to order " +
                                            std::to_string(max_order()));
  const int n = F_.n();
  Jet F2 = F_.F2_jet(u, order + 4);
  GeometryJets G;
  G.shape = F_.shape();
  G.order = order;
  G.u.assign(u.begin(), u.end());
  G.g = truncate(half_y_hessian(F2, n), order);
  G.h = G.g;
  G.N = cartan_jets(F2, n, u);
  return G;
}

}  // namespace dgeom
