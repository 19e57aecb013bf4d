#include "dgeom/bundle.hpp"

#include "dgeom/jet_linalg.hpp"

namespace dgeom {

namespace {

int tri(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::vector<ScalarField> parse_symmetric(const std::vector<std::vector<std::string>>& rows, int n,
                                         BundleShape s, const char* name) {
  if (static_cast<int>(rows.size()) != n)
    throw ConfigError(std::string(name) + " block must have " + std::to_string(n) + " rows");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != n)
      throw ConfigError(std::string(name) + " block must be " + std::to_string(n) + "x" +
                        std::to_string(n));
  std::vector<ScalarField> out(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      ScalarField a = parse_field(rows[i][j], s);
      if (i != j) {
        ScalarField b = parse_field(rows[j][i], s);
        if (a.to_string() != b.to_string())
          throw ConfigError(std::string(name) + " block is not symmetric at (" +
                            std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
      out[tri(i, j, n)] = a;
    }
  }
  return out;
}

}  // namespace

NConnectionField NConnectionField::zero(BundleShape s) {
  NConnectionField f;
  f.shape = s;
  f.N.assign(s.n * s.m, ScalarField::constant(0.0, s));
  return f;
}

NConnectionField NConnectionField::parse(const std::vector<std::vector<std::string>>& rows,
                                         BundleShape s) {
  validate(s);
  if (static_cast<int>(rows.size()) != s.m)
    throw ConfigError("N must have m = " + std::to_string(s.m) + " rows (one per fiber index)");
  NConnectionField f;
  f.shape = s;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != s.n)
      throw ConfigError("each N row must have n = " + std::to_string(s.n) + " entries");
    for (const auto& e : r) f.N.push_back(parse_field(e, s));
  }
  return f;
}

const ScalarField& DMetricField::g_at(int i, int j) const { return g[tri(i, j, shape.n)]; }
const ScalarField& DMetricField::h_at(int a, int b) const { return h[tri(a, b, shape.m)]; }

DMetricField DMetricField::identity(BundleShape s) {
  DMetricField M;
  M.shape = s;
  M.g.resize(s.n * (s.n + 1) / 2);
  M.h.resize(s.m * (s.m + 1) / 2);
  for (int i = 0; i < s.n; ++i)
    for (int j = i; j < s.n; ++j) M.g[tri(i, j, s.n)] = ScalarField::constant(i == j ? 1.0 : 0.0, s);
  for (int a = 0; a < s.m; ++a)
    for (int b = a; b < s.m; ++b) M.h[tri(a, b, s.m)] = ScalarField::constant(a == b ? 1.0 : 0.0, s);
  return M;
}

DMetricField DMetricField::parse(const std::vector<std::vector<std::string>>& g,
                                 const std::vector<std::vector<std::string>>& h, BundleShape s) {
  validate(s);
  DMetricField M;
  M.shape = s;
  M.g = parse_symmetric(g, s.n, s, "g");
  M.h = parse_symmetric(h, s.m, s, "h");
  return M;
}

FieldGeometry::FieldGeometry(DMetricField metric, NConnectionField n)
    : metric_(std::move(metric)), n_(std::move(n)) {
  if (!(metric_.shape == n_.shape)) throw ConfigError("metric and N-connection shapes differ");
}

GeometryJets FieldGeometry::jets(std::span<const double> u, int order) const {
  const BundleShape s = metric_.shape;
  const int d = s.dim();
  GeometryJets G;
  G.shape = s;
  G.order = order;
  G.u.assign(u.begin(), u.end());
  G.g = JetTensor({s.n, s.n}, Jet(d, order));
  G.h = JetTensor({s.m, s.m}, Jet(d, order));
  G.N = JetTensor({s.m, s.n}, Jet(d, order));
  for (int i = 0; i < s.n; ++i)
    for (int j = i; j < s.n; ++j) G.g(i, j) = G.g(j, i) = metric_.g_at(i, j).eval_jet(u, order);
  for (int a = 0; a < s.m; ++a)
    for (int b = a; b < s.m; ++b) G.h(a, b) = G.h(b, a) = metric_.h_at(a, b).eval_jet(u, order);
  for (int a = 0; a < s.m; ++a)
    for (int i = 0; i < s.n; ++i) G.N(a, i) = n_.at(a, i).eval_jet(u, order);
  return G;
}

Jet elongated(const GeometryJets& G, const Jet& f, int alpha) {
  const int n = G.shape.n;
  if (alpha >= n) return f.derivative(alpha);
  Jet r = f.derivative(alpha);
  for (int b = 0; b < G.shape.m; ++b) r -= G.N(b, alpha) * f.derivative(n + b);
  return r;
}

JetTensor n_curvature_jets(const GeometryJets& G) {
  const int n = G.shape.n, m = G.shape.m;
  JetTensor Om({m, n, n}, Jet(G.shape.dim(), G.order - 1));
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) Om(a, i, j) = elongated(G, G.N(a, i), j) - elongated(G, G.N(a, j), i);
  return Om;
}

JetTensor anholonomy_jets(const GeometryJets& G) {
  const int n = G.shape.n, m = G.shape.m, d = n + m;
  JetTensor W({d, d, d}, Jet(d, G.order - 1));
  JetTensor Om = n_curvature_jets(G);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) W(n + a, i, j) = Om(a, i, j);
  for (int b = 0; b < m; ++b)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) {
        Jet dN = G.N(b, i).derivative(n + a);
        W(n + b, n + a, i) = -dN;
        W(n + b, i, n + a) = dN;
      }
  return W;
}

RealTensor n_curvature_values(const GeometryJets& G) { return values(n_curvature_jets(G)); }

namespace {

GeometryJets n_only_jets(const NConnectionField& N, std::span<const double> u, int order) {
  GeometryJets G;
  G.shape = N.shape;
  G.order = order;
  G.u.assign(u.begin(), u.end());
  G.N = JetTensor({N.shape.m, N.shape.n}, Jet(N.shape.dim(), order));
  for (int a = 0; a < N.shape.m; ++a)
    for (int i = 0; i < N.shape.n; ++i) G.N(a, i) = N.at(a, i).eval_jet(u, order);
  return G;
}

}  // namespace

FramePoint adapted_frame(const NConnectionField& N, std::span<const double> u) {
  const int n = N.shape.n, m = N.shape.m, d = n + m;
  FramePoint F;
  F.e = Eigen::MatrixXd::Identity(d, d);
  F.e_inv = Eigen::MatrixXd::Identity(d, d);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      double v = N.at(a, i).eval(u);
      F.e(n + a, i) = -v;
      F.e_inv(n + a, i) = v;
    }
  return F;
}

AnholonomyPoint anholonomy(const NConnectionField& N, std::span<const double> u) {
  return {values(anholonomy_jets(n_only_jets(N, u, 1)))};
}

NCurvaturePoint n_curvature(const NConnectionField& N, std::span<const double> u) {
  return {n_curvature_values(n_only_jets(N, u, 1))};
}

Eigen::MatrixXd offdiagonal_metric(const DMetricField& M, const NConnectionField& N,
                                   std::span<const double> u) {
  if (!(M.shape == N.shape)) throw ConfigError("metric and N-connection shapes differ");
  const int n = M.shape.n, m = M.shape.m, d = n + m;
  Eigen::MatrixXd g(n, n), h(m, m), Nm(m, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = M.g_at(i, j).eval(u);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) h(a, b) = M.h_at(a, b).eval(u);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) Nm(a, i) = N.at(a, i).eval(u);
  Eigen::MatrixXd G(d, d);
  G.topLeftCorner(n, n) = g + Nm.transpose() * h * Nm;
  G.topRightCorner(n, m) = Nm.transpose() * h;
  G.bottomLeftCorner(m, n) = h * Nm;
  G.bottomRightCorner(m, m) = h;
  return G;
}

RealTensor n_transform(const NConnectionField& N, const std::vector<ScalarField>& M,
                       std::span<const double> u) {
  const int n = N.shape.n, m = N.shape.m;
  if (static_cast<int>(M.size()) != m * m) throw ConfigError("fiber transform must be m x m");
  Eigen::MatrixXd Mv(m, m);
  std::vector<Jet> Mj;
  for (int k = 0; k < m * m; ++k) {
    Mj.push_back(M[k].eval_jet(u, 1));
    Mv(k / m, k % m) = Mj.back().value();
  }
  if (condition_number(Mv) > kConditionLimit) throw DegenerateError("fiber transform is singular");
  RealTensor out({m, n}, 0.0);
  for (int ap = 0; ap < m; ++ap)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        s += Mv(ap, a) * N.at(a, i).eval(u);
        s -= Mj[ap * m + a].d1(i) * u[n + a];
      }
      out(ap, i) = s;
    }
  return out;
}

}  // namespace dgeom
