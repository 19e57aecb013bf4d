#include "dgeom/ncalg.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace dgeom {

Poly Poly::constant(int nvars, cdouble c) {
  Poly p(nvars);
  p.add(Exponent(nvars, 0), c);
  return p;
}

Poly Poly::var(int nvars, int v, cdouble c) {
  Exponent e(nvars, 0);
  e.at(v) = 1;
  Poly p(nvars);
  p.add(e, c);
  return p;
}

Poly Poly::monomial(const Exponent& e, cdouble c) {
  Poly p(static_cast<int>(e.size()));
  p.add(e, c);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [e, c] : t_) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

void Poly::add(const Exponent& e, cdouble c) {
  if (static_cast<int>(e.size()) != n_) throw ConfigError("polynomial variable counts differ");
  if (c == 0.0) return;
  auto [it, fresh] = t_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0.0) t_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.n_ != n_) throw ConfigError("polynomial variable counts differ");
  for (const auto& [e, c] : o.t_) add(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.n_ != n_) throw ConfigError("polynomial variable counts differ");
  for (const auto& [e, c] : o.t_) add(e, -c);
  return *this;
}

Poly& Poly::operator*=(cdouble s) {
  if (s == 0.0) {
    t_.clear();
    return *this;
  }
  for (auto& [e, c] : t_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.n_ != b.n_) throw ConfigError("polynomial variable counts differ");
  Poly r(a.n_);
  Exponent e(a.n_);
  for (const auto& [ea, ca] : a.t_)
    for (const auto& [eb, cb] : b.t_) {
      for (int v = 0; v < a.n_; ++v) e[v] = ea[v] + eb[v];
      r.add(e, ca * cb);
    }
  return r;
}

Poly Poly::derivative(int v) const {
  Poly r(n_);
  for (const auto& [e, c] : t_) {
    if (e[v] == 0) continue;
    Exponent f = e;
    --f[v];
    r.add(f, c * double(e[v]));
  }
  return r;
}

Poly Poly::conj() const {
  Poly r(n_);
  for (const auto& [e, c] : t_) r.add(e, std::conj(c));
  return r;
}

cdouble Poly::eval(const std::vector<cdouble>& u) const {
  cdouble s = 0.0;
  for (const auto& [e, c] : t_) {
    cdouble m = c;
    for (int v = 0; v < n_; ++v)
      for (int k = 0; k < e[v]; ++k) m *= u[v];
    s += m;
  }
  return s;
}

Poly Poly::widen(int nvars) const {
  if (nvars < n_) throw ConfigError("cannot narrow a polynomial");
  Poly r(nvars);
  for (const auto& [e, c] : t_) {
    Exponent f = e;
    f.resize(nvars, 0);
    r.add(f, c);
  }
  return r;
}

namespace {

std::string num(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Coefficient text and whether it was negated for a " - " join.
std::pair<std::string, bool> coeff_text(cdouble c) {
  const double re = c.real(), im = c.imag();
  if (im == 0.0) return {num(std::abs(re)), re < 0.0};
  if (re == 0.0) {
    std::string m = std::abs(im) == 1.0 ? "i" : num(std::abs(im)) + "i";
    return {m, im < 0.0};
  }
  std::string s = "(" + num(re) + (im < 0 ? "-" : "+") +
                  (std::abs(im) == 1.0 ? "" : num(std::abs(im))) + "i)";
  return {s, false};
}

}  // namespace

std::string Poly::to_string() const {
  if (t_.empty()) return "0";
  // Highest degree first, then the map order.
  std::vector<std::pair<Exponent, cdouble>> terms(t_.begin(), t_.end());
  auto deg = [](const Exponent& e) {
    int s = 0;
    for (int x : e) s += x;
    return s;
  };
  std::stable_sort(terms.begin(), terms.end(),
                   [&](const auto& a, const auto& b) { return deg(a.first) > deg(b.first); });
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms) {
    std::string mono;
    for (int v = 0; v < n_; ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "u" + std::to_string(v + 1);
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    auto [ct, neg] = coeff_text(c);
    std::string term;
    if (mono.empty())
      term = ct;
    else if (ct == "1")
      term = mono;
    else
      term = ct + "*" + mono;
    if (first)
      out = (neg ? "-" : "") + term;
    else
      out += (neg ? " - " : " + ") + term;
    first = false;
  }
  return out;
}

double max_abs_diff(const Poly& a, const Poly& b) {
  Poly d = a.widen(std::max(a.nvars(), b.nvars())) - b.widen(std::max(a.nvars(), b.nvars()));
  double m = 0.0;
  for (const auto& [e, c] : d.terms()) m = std::max(m, std::abs(c));
  return m;
}

namespace {

// Literals are parsed over nine variables and narrowed afterwards.
constexpr int kParseVars = 9;

class PolyParser {
public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  Poly parse() {
    Poly p = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }
  int max_var() const { return max_var_; }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly sum() {
    Poly p = product();
    for (;;) {
      if (eat('+'))
        p += product();
      else if (eat('-'))
        p -= product();
      else
        return p;
    }
  }

  Poly product() {
    Poly p = unary();
    while (eat('*')) p = p * unary();
    return p;
  }

  Poly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = atom();
    if (!eat('^')) return base;
    skip();
    int e = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), e);
    if (ec != std::errc() || e < 0 || e > 32) fail("expected a small non-negative integer exponent");
    pos_ = ptr - s_.data();
    Poly r = Poly::constant(kParseVars, 1.0);
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
  }

  Poly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Poly p = sum();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), x);
      if (ec != std::errc()) fail("malformed number");
      pos_ = ptr - s_.data();
      if (pos_ < s_.size() && s_[pos_] == 'i') {
        ++pos_;
        return Poly::constant(kParseVars, cdouble(0.0, x));
      }
      return Poly::constant(kParseVars, x);
    }
    if (c == 'i') {
      ++pos_;
      return Poly::constant(kParseVars, cdouble(0.0, 1.0));
    }
    if (c == 'u' || c == 'v') {
      ++pos_;
      int v = c == 'u' ? 0 : 1;
      if (c == 'u' && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = s_[pos_] - '1';
        ++pos_;
        if (v < 0 || v >= kParseVars) fail("variable index must be 1..9");
      }
      max_var_ = std::max(max_var_, v + 1);
      return Poly::var(kParseVars, v);
    }
    fail("unknown symbol '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int max_var_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text, int nvars) {
  PolyParser p(text);
  Poly wide = p.parse();
  const int n = nvars < 0 ? std::max(1, p.max_var()) : nvars;
  if (p.max_var() > n)
    throw ParseError("variable u" + std::to_string(p.max_var()) + " exceeds the " +
                         std::to_string(n) + " available",
                     0);
  Poly r(n);
  for (const auto& [e, c] : wide.terms()) r.add(Exponent(e.begin(), e.begin() + n), c);
  return r;
}

ThetaMatrix ThetaMatrix::from_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("theta must be square");
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError("theta must be antisymmetric");
  return {m};
}

ThetaMatrix ThetaMatrix::from_csv(const std::string& csv, int N) {
  std::vector<double> v;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    const char* b = item.data();
    while (*b == ' ') ++b;
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(b, item.data() + item.size(), x);
    if (ec != std::errc()) throw ParseError("malformed theta entry '" + item + "'", v.size());
    v.push_back(x);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
  if (static_cast<int>(v.size()) == N * (N - 1) / 2) {
    int k = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        m(i, j) = v[k++];
        m(j, i) = -m(i, j);
      }
  } else if (static_cast<int>(v.size()) == N * N) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = v[i * N + j];
  } else {
    throw ConfigError("theta needs " + std::to_string(N * (N - 1) / 2) + " or " +
                      std::to_string(N * N) + " entries for " + std::to_string(N) + " variables");
  }
  return from_matrix(m);
}

LieStructure LieStructure::zero(int dim) {
  LieStructure L;
  L.dim = dim;
  L.f.assign(dim * dim * dim, 0.0);
  return L;
}

LieStructure LieStructure::su2() {
  LieStructure L = zero(3);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    L.at(a, b, c) = 1.0;
    L.at(b, a, c) = -1.0;
  }
  return L;
}

LieStructure LieStructure::heisenberg(const ThetaMatrix& th) {
  const int N = th.size();
  LieStructure L = zero(N + 1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) L.at(i, j, N) = th.theta(i, j);
  return L;
}

double LieStructure::antisymmetry_residual() const {
  double w = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) w = std::max(w, std::abs(at(a, b, c) + at(b, a, c)));
  return w;
}

double LieStructure::jacobi_residual() const {
  double w = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int n = 0; n < dim; ++n) {
          double s = 0.0;
          for (int m = 0; m < dim; ++m)
            s += at(a, b, m) * at(m, c, n) + at(b, c, m) * at(m, a, n) + at(c, a, m) * at(m, b, n);
          w = std::max(w, std::abs(s));
        }
  return w;
}

namespace {

// Polynomials in copies of the variables: block k holds variables
// [k N, (k + 1) N).  Products are formed there and then merged.
Poly tensor(const Poly& f, const Poly& g, int blocks, int bf, int bg) {
  const int N = f.nvars();
  Poly r(blocks * N);
  Exponent e(blocks * N, 0);
  for (const auto& [ef, cf] : f.terms())
    for (const auto& [eg, cg] : g.terms()) {
      std::fill(e.begin(), e.end(), 0);
      for (int v = 0; v < N; ++v) {
        e[bf * N + v] = ef[v];
        e[bg * N + v] = eg[v];
      }
      r.add(e, cf * cg);
    }
  return r;
}

Poly merge(const Poly& T, int blocks, int N) {
  Poly r(N);
  Exponent e(N);
  for (const auto& [et, c] : T.terms()) {
    std::fill(e.begin(), e.end(), 0);
    for (int k = 0; k < blocks; ++k)
      for (int v = 0; v < N; ++v) e[v] += et[k * N + v];
    r.add(e, c);
  }
  return r;
}

// One term of a differential operator on the block polynomial: differentiate
// in the listed variables, then multiply by one variable, with weight w.
struct BiTerm {
  std::vector<int> d;  // variables to differentiate (absolute)
  int mul = -1;        // variable to multiply by, or -1
  cdouble w;
};

Poly apply_op(const Poly& T, const std::vector<BiTerm>& ops) {
  Poly r(T.nvars());
  for (const auto& [e, c] : T.terms())
    for (const auto& op : ops) {
      Exponent f = e;
      cdouble k = c * op.w;
      bool ok = true;
      for (int v : op.d) {
        if (f[v] == 0) {
          ok = false;
          break;
        }
        k *= double(f[v]);
        --f[v];
      }
      if (!ok) continue;
      if (op.mul >= 0) ++f[op.mul];
      r.add(f, k);
    }
  return r;
}

}  // namespace

Poly moyal_star(const Poly& f, const Poly& g, const ThetaMatrix& th) {
  if (f.nvars() != g.nvars()) throw ConfigError("polynomial variable counts differ");
  const int N = f.nvars();
  if (th.size() != N) throw ConfigError("theta size differs from the number of variables");
  std::vector<BiTerm> P;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (th.theta(i, j) != 0.0) P.push_back({{i, N + j}, -1, th.theta(i, j)});
  Poly T = tensor(f, g, 2, 0, 1);
  Poly out(N);
  cdouble w = 1.0;
  for (int k = 0; !T.is_zero(); ++k) {
    out += merge(T, 2, N) * w;
    T = apply_op(T, P);
    w *= cdouble(0.0, 0.5) / double(k + 1);
  }
  return out;
}

Poly lie_star(const Poly& f, const Poly& g, const LieStructure& L, int order) {
  if (order < 0 || order > kMaxLieStarOrder)
    throw OrderError("lie_star is implemented to second order in the structure constants");
  const int N = L.dim;
  if (f.nvars() > N || g.nvars() > N) throw ConfigError("polynomial has more variables than the Lie algebra");
  // Blocks: 0 = u (multiplier), 1 = u' (acts on f), 2 = u'' (acts on g).
  Poly T = tensor(f.widen(N), g.widen(N), 3, 1, 2);
  const cdouble half_i(0.0, 0.5);
  std::vector<BiTerm> X1, X2;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int n = 0; n < N; ++n)
        if (L.at(i, j, n) != 0.0) X1.push_back({{N + i, 2 * N + j}, n, half_i * L.at(i, j, n)});
  if (order >= 2)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int n = 0; n < N; ++n) {
            double ff = 0.0;
            for (int m = 0; m < N; ++m) ff += L.at(i, j, m) * L.at(m, k, n);
            if (ff == 0.0) continue;
            X2.push_back({{N + i, 2 * N + j, 2 * N + k}, n, ff / 12.0});
            X2.push_back({{N + i, 2 * N + j, N + k}, n, -ff / 12.0});
          }
  Poly acc = T;
  Poly t1 = apply_op(T, X1);
  acc += t1;
  if (order >= 2) {
    acc += apply_op(t1, X1) * 0.5;
    acc += apply_op(T, X2);
  }
  return merge(acc, 3, N);
}

Poly qplane_star(const Poly& f, const Poly& g, cdouble q, QPlaneOrdering ord) {
  if (q == 0.0) throw ConfigError("quantum plane parameter q must be nonzero");
  if (f.nvars() != 2 || g.nvars() != 2) throw ConfigError("the quantum plane has exactly two variables");
  Poly r(2);
  for (const auto& [ef, cf] : f.terms())
    for (const auto& [eg, cg] : g.terms()) {
      const int a = ef[0], b = ef[1], c = eg[0], d = eg[1];
      const double x = ord == QPlaneOrdering::Normal ? -double(b * c) : 0.5 * double(a * d - b * c);
      r.add({a + c, b + d}, cf * cg * std::pow(q, x));
    }
  return r;
}

Poly qplane_symmetric_to_normal(const Poly& f, cdouble q) {
  if (f.nvars() != 2) throw ConfigError("the quantum plane has exactly two variables");
  Poly r(2);
  for (const auto& [e, c] : f.terms()) r.add(e, c * std::pow(q, -0.5 * double(e[0] * e[1])));
  return r;
}

Poly star(const Poly& f, const Poly& g, const StarProduct& p) {
  return std::visit(
      [&](const auto& s) -> Poly {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MoyalProduct>)
          return moyal_star(f, g, s.theta);
        else if constexpr (std::is_same_v<S, LieProduct>)
          return lie_star(f, g, s.L, s.order);
        else
          return qplane_star(f, g, s.q, s.ordering);
      },
      p);
}

Poly star_commutator(const Poly& f, const Poly& g, const StarProduct& p) {
  return star(f, g, p) - star(g, f, p);
}

}  // namespace dgeom
