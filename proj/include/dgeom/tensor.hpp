// Small dense arrays of rank <= 4, row-major.  Index order for connection-like
// objects is (upper, lower-left, lower-right) throughout.
#pragma once

#include <array>
#include <cassert>
#include <initializer_list>
#include <vector>

#include "dgeom/jet.hpp"

namespace dgeom {

template <class T>
class Tensor {
public:
  Tensor() = default;
  Tensor(std::initializer_list<int> dims, const T& init = T{}) {
    rank_ = static_cast<int>(dims.size());
    int k = 0;
    std::size_t total = 1;
    for (int d : dims) {
      dims_[k++] = d;
      total *= static_cast<std::size_t>(d);
    }
    data_.assign(total, init);
  }

  int rank() const { return rank_; }
  int dim(int k) const { return dims_[k]; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int i) { return data_[i]; }
  const T& operator()(int i) const { return data_[i]; }
  T& operator()(int i, int j) { return data_[off(i, j)]; }
  const T& operator()(int i, int j) const { return data_[off(i, j)]; }
  T& operator()(int i, int j, int k) { return data_[off(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return data_[off(i, j, k)]; }
  T& operator()(int i, int j, int k, int l) { return data_[off(i, j, k, l)]; }
  const T& operator()(int i, int j, int k, int l) const { return data_[off(i, j, k, l)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <class F>
  auto map(F f) const -> Tensor<decltype(f(std::declval<const T&>()))> {
    Tensor<decltype(f(std::declval<const T&>()))> r;
    r.reshape_like(*this);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data()[i] = f(data_[i]);
    return r;
  }

  template <class U>
  void reshape_like(const Tensor<U>& o) {
    rank_ = o.rank();
    for (int k = 0; k < 4; ++k) dims_[k] = k < rank_ ? o.dim(k) : 1;
    data_.resize(o.size());
  }

private:
  std::size_t off(int i, int j) const { return std::size_t(i) * dims_[1] + j; }
  std::size_t off(int i, int j, int k) const { return (std::size_t(i) * dims_[1] + j) * dims_[2] + k; }
  std::size_t off(int i, int j, int k, int l) const {
    return ((std::size_t(i) * dims_[1] + j) * dims_[2] + k) * dims_[3] + l;
  }

  int rank_ = 0;
  std::array<int, 4> dims_{1, 1, 1, 1};
  std::vector<T> data_;
};

using JetTensor = Tensor<Jet>;
using RealTensor = Tensor<double>;

inline RealTensor values(const JetTensor& t) {
  return t.map([](const Jet& j) { return j.value(); });
}

inline JetTensor truncate(const JetTensor& t, int k) {
  return t.map([k](const Jet& j) { return j.truncate(k); });
}

inline JetTensor derivative(const JetTensor& t, int v) {
  return t.map([v](const Jet& j) { return j.derivative(v); });
}

double max_abs(const RealTensor& t);
double max_abs_diff(const RealTensor& a, const RealTensor& b);

}  // namespace dgeom
