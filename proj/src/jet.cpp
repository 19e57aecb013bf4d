#include "dgeom/jet.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace dgeom {

namespace {

constexpr int kBase = kMaxJetOrder + 1;

void enumerate(int d, int degree, int v, MultiIndex& cur, std::vector<MultiIndex>& out) {
  // Lex order with the first variable most significant: highest power of u_0 first.
  if (v == d - 1) {
    cur[v] = static_cast<std::uint8_t>(degree);
    out.push_back(cur);
    cur[v] = 0;
    return;
  }
  for (int k = degree; k >= 0; --k) {
    cur[v] = static_cast<std::uint8_t>(k);
    enumerate(d, degree - k, v + 1, cur, out);
  }
  cur[v] = 0;
}

}  // namespace

JetLayout::JetLayout(int d) : d_(d) {
  prefix_.assign(kMaxJetOrder + 1, 0);
  for (int k = 0; k <= kMaxJetOrder; ++k) {
    MultiIndex cur{};
    enumerate(d, k, 0, cur, idx_);
    prefix_[k] = static_cast<int>(idx_.size());
  }
  const int n = static_cast<int>(idx_.size());
  int lsize = 1;
  for (int v = 0; v < d; ++v) lsize *= kBase;
  lookup_.assign(lsize, -1);
  deg_.resize(n);
  fact_.resize(n);
  for (int i = 0; i < n; ++i) {
    lookup_[code(idx_[i])] = i;
    int s = 0;
    double f = 1.0;
    for (int v = 0; v < d; ++v) {
      s += idx_[i][v];
      for (int t = 2; t <= idx_[i][v]; ++t) f *= t;
    }
    deg_[i] = s;
    fact_[i] = f;
  }
  raise_.assign(static_cast<std::size_t>(n) * kMaxVars, -1);
  for (int i = 0; i < n; ++i) {
    for (int v = 0; v < d; ++v) {
      MultiIndex a = idx_[i];
      a[v]++;
      raise_[i * kMaxVars + v] = find(a);
    }
  }
  // Product pairs grouped by the output index.
  std::vector<std::vector<std::pair<int, int>>> by_c(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < prefix_[kMaxJetOrder - deg_[a]]; ++b) {
      MultiIndex s{};
      for (int v = 0; v < d; ++v) s[v] = static_cast<std::uint8_t>(idx_[a][v] + idx_[b][v]);
      by_c[find(s)].emplace_back(a, b);
    }
  }
  pair_start_.assign(n + 1, 0);
  for (int c = 0; c < n; ++c) {
    pair_start_[c + 1] = pair_start_[c] + static_cast<int>(by_c[c].size());
    for (auto [a, b] : by_c[c]) {
      pa_.push_back(a);
      pb_.push_back(b);
    }
  }
}

int JetLayout::code(const MultiIndex& a) const {
  int c = 0;
  for (int v = d_ - 1; v >= 0; --v) c = c * kBase + a[v];
  return c;
}

int JetLayout::find(const MultiIndex& a) const {
  int s = 0;
  for (int v = 0; v < d_; ++v) s += a[v];
  for (int v = d_; v < kMaxVars; ++v)
    if (a[v] != 0) return -1;
  if (s > kMaxJetOrder) return -1;
  return lookup_[code(a)];
}

const JetLayout& JetLayout::get(int d) {
  static std::once_flag flags[kMaxVars + 1];
  static std::unique_ptr<JetLayout> tables[kMaxVars + 1];
  if (d < 1 || d > kMaxVars) throw OrderError("jet variable count out of range");
  std::call_once(flags[d], [d] { tables[d].reset(new JetLayout(d)); });
  return *tables[d];
}

Jet compose(const Jet& a, const std::vector<double>& series) {
  // Horner in the non-constant part t = a - a0; t^k vanishes beyond the order.
  Jet t = a;
  t[0] = 0.0;
  const int K = a.order();
  Jet r(a.vars(), K, series[K]);
  for (int k = K - 1; k >= 0; --k) {
    r = r * t;
    r[0] += series[k];
  }
  return r;
}

namespace {

// Coefficients of (a0 + t)^p for real p.
std::vector<double> power_series(double a0, double p, int K) {
  std::vector<double> s(K + 1);
  double binom = 1.0;
  for (int k = 0; k <= K; ++k) {
    s[k] = binom * std::pow(a0, p - k);
    binom *= (p - k) / double(k + 1);
  }
  return s;
}

}  // namespace

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<double> f(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    const double d[4] = {s, c, -s, -c};
    f[k] = d[k % 4] / fact;
  }
  return compose(a, f);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<double> f(a.order() + 1);
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    const double d[4] = {c, -s, -c, s};
    f[k] = d[k % 4] / fact;
  }
  return compose(a, f);
}

Jet tan(const Jet& a) {
  if (std::abs(std::cos(a.value())) < 1e-300) throw DomainError("tan evaluated at a pole");
  return sin(a) / cos(a);
}

Jet exp(const Jet& a) {
  std::vector<double> f(a.order() + 1);
  const double e = std::exp(a.value());
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    f[k] = e / fact;
  }
  return compose(a, f);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("log of a non-positive value");
  std::vector<double> f(a.order() + 1);
  f[0] = std::log(a0);
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p *= a0;
    f[k] = ((k % 2) ? 1.0 : -1.0) / (k * p);
  }
  return compose(a, f);
}

Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (a0 < 0.0) throw DomainError("sqrt of a negative value");
  if (a0 == 0.0) {
    if (a.order() > 0) throw DomainError("sqrt is not differentiable at zero");
    return Jet(a.vars(), 0, 0.0);
  }
  return compose(a, power_series(a0, 0.5, a.order()));
}

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0)) throw DomainError("division by zero");
  return compose(a, power_series(a0, -1.0, a.order()));
}

Jet pow(const Jet& a, int p) {
  if (p < 0) return reciprocal(pow(a, -p));
  Jet r(a.vars(), a.order(), 1.0);
  Jet base = a;
  // Binary powering keeps polynomials exact.
  while (p > 0) {
    if (p & 1) r = r * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

}  // namespace dgeom
