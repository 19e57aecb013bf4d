// Truncated multivariate Taylor jets.
//
// A jet of order K in d variables stores the Taylor coefficients
// c_beta = (d^beta f)(u) / beta! for |beta| <= K.  Multi-indices are ordered by
// total degree, then lexicographically, so the order-k part of a jet is a
// prefix of its coefficient vector.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "dgeom/errors.hpp"

namespace dgeom {

inline constexpr int kMaxVars = 6;
inline constexpr int kMaxJetOrder = 8;

using MultiIndex = std::array<std::uint8_t, kMaxVars>;

// Index tables for one variable count, built once up to kMaxJetOrder.
class JetLayout {
public:
  static const JetLayout& get(int d);

  int vars() const { return d_; }
  // Number of multi-indices with total degree <= k.
  int size(int k) const { return prefix_[k]; }
  const MultiIndex& index(int i) const { return idx_[i]; }
  int degree(int i) const { return deg_[i]; }
  // Position of alpha in the table, or -1 if |alpha| > kMaxJetOrder.
  int find(const MultiIndex& alpha) const;
  // Position of alpha + e_v, or -1.
  int raise(int i, int v) const { return raise_[i * kMaxVars + v]; }
  // beta! for the i-th multi-index.
  double factorial(int i) const { return fact_[i]; }

  // Pairs (a, b) with alpha_a + alpha_b = alpha_c, grouped by c.
  int pair_begin(int c) const { return pair_start_[c]; }
  int pair_end(int c) const { return pair_start_[c + 1]; }
  int pair_a(int p) const { return pa_[p]; }
  int pair_b(int p) const { return pb_[p]; }

private:
  explicit JetLayout(int d);
  int code(const MultiIndex& a) const;

  int d_;
  std::vector<MultiIndex> idx_;
  std::vector<int> deg_;
  std::vector<int> prefix_;
  std::vector<int> lookup_;
  std::vector<int> raise_;
  std::vector<double> fact_;
  std::vector<int> pair_start_, pa_, pb_;
};

template <class T>
T zero_of() {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else if constexpr (std::is_same_v<T, std::complex<double>>) {
    return T(0.0, 0.0);
  } else {
    return T::Zero();
  }
}

template <class T>
class BasicJet {
public:
  BasicJet() = default;
  BasicJet(int d, int order) : d_(d), order_(order) {
    check_shape(d, order);
    c_.assign(JetLayout::get(d).size(order), zero_of<T>());
  }
  BasicJet(int d, int order, const T& value) : BasicJet(d, order) { c_[0] = value; }

  static BasicJet constant(int d, int order, const T& value) {
    return BasicJet(d, order, value);
  }
  // The coordinate function u_v expanded around value.
  static BasicJet variable(int d, int order, int v, const T& value) {
    BasicJet j(d, order, value);
    if (order >= 1) j.c_[1 + v] = T(1);
    return j;
  }

  int vars() const { return d_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(c_.size()); }
  const T& value() const { return c_[0]; }
  const T& operator[](int i) const { return c_[i]; }
  T& operator[](int i) { return c_[i]; }
  const std::vector<T>& coeffs() const { return c_; }
  const JetLayout& layout() const { return JetLayout::get(d_); }

  // Taylor coefficient for alpha (zero when |alpha| exceeds the order).
  T coeff(const MultiIndex& alpha) const {
    int i = layout().find(alpha);
    if (i < 0 || i >= size()) return zero_of<T>();
    return c_[i];
  }
  // The partial derivative d^alpha f at the expansion point.
  T partial(const MultiIndex& alpha) const {
    int i = layout().find(alpha);
    if (i < 0 || i >= size()) return zero_of<T>();
    return c_[i] * layout().factorial(i);
  }
  // First derivative d_v f at the point.
  T d1(int v) const { return order_ >= 1 ? c_[1 + v] : zero_of<T>(); }

  BasicJet truncate(int k) const {
    if (k >= order_) return *this;
    BasicJet r;
    r.d_ = d_;
    r.order_ = k;
    r.c_.assign(c_.begin(), c_.begin() + JetLayout::get(d_).size(k));
    return r;
  }

  // d/du_v as a jet of order - 1.
  BasicJet derivative(int v) const {
    if (order_ == 0) throw OrderError("cannot differentiate an order-0 jet");
    const JetLayout& L = layout();
    BasicJet r(d_, order_ - 1);
    for (int i = 0; i < r.size(); ++i) {
      int j = L.raise(i, v);
      r.c_[i] = c_[j] * double(L.index(i)[v] + 1);
    }
    return r;
  }

  BasicJet& operator+=(const BasicJet& o) {
    shrink_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  BasicJet& operator-=(const BasicJet& o) {
    shrink_to(o.order_);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BasicJet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  BasicJet operator-() const {
    BasicJet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  void add_constant(const T& v) { c_[0] += v; }

  friend BasicJet operator+(BasicJet a, const BasicJet& b) { return a += b; }
  friend BasicJet operator-(BasicJet a, const BasicJet& b) { return a -= b; }
  friend BasicJet operator*(BasicJet a, double s) { return a *= s; }
  friend BasicJet operator*(double s, BasicJet a) { return a *= s; }

  // Truncated Cauchy product; the result has the smaller of the two orders.
  template <class U>
  friend auto operator*(const BasicJet& a, const BasicJet<U>& b)
      -> BasicJet<decltype(std::declval<T>() * std::declval<U>())> {
    using R = decltype(std::declval<T>() * std::declval<U>());
    int k = std::min(a.order(), b.order());
    BasicJet<R> r(a.vars(), k);
    const JetLayout& L = a.layout();
    const int n = r.size();
    for (int c = 0; c < n; ++c) {
      R acc = zero_of<R>();
      for (int p = L.pair_begin(c); p < L.pair_end(c); ++p)
        acc += a[L.pair_a(p)] * b[L.pair_b(p)];
      r[c] = acc;
    }
    return r;
  }

  // Multiply every coefficient by a constant from either side.
  template <class U>
  BasicJet<decltype(std::declval<U>() * std::declval<T>())> lmul(const U& s) const {
    BasicJet<decltype(std::declval<U>() * std::declval<T>())> r(d_, order_);
    for (int i = 0; i < size(); ++i) r[i] = s * c_[i];
    return r;
  }
  template <class U>
  BasicJet<decltype(std::declval<T>() * std::declval<U>())> rmul(const U& s) const {
    BasicJet<decltype(std::declval<T>() * std::declval<U>())> r(d_, order_);
    for (int i = 0; i < size(); ++i) r[i] = c_[i] * s;
    return r;
  }

  template <class U, class F>
  BasicJet<U> map(F f) const {
    BasicJet<U> r(d_, order_);
    for (int i = 0; i < size(); ++i) r[i] = f(c_[i]);
    return r;
  }

private:
  static void check_shape(int d, int order) {
    if (d < 1 || d > kMaxVars) throw OrderError("jet variable count out of range");
    if (order < 0 || order > kMaxJetOrder) throw OrderError("jet order exceeds the supported maximum");
  }
  void shrink_to(int k) {
    if (k < order_) *this = truncate(k);
  }

  int d_ = 1;
  int order_ = 0;
  std::vector<T> c_;
};

using Jet = BasicJet<double>;
using CJet = BasicJet<std::complex<double>>;

inline CJet to_complex(const Jet& a) {
  return a.map<std::complex<double>>([](double x) { return std::complex<double>(x, 0.0); });
}

// f(a) for a univariate f given by its Taylor coefficients f^(k)(a0)/k!.
Jet compose(const Jet& a, const std::vector<double>& series);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet reciprocal(const Jet& a);
Jet pow(const Jet& a, int p);
Jet operator/(const Jet& a, const Jet& b);

}  // namespace dgeom
