#include "dgeom/jet_linalg.hpp"

#include <string>

namespace dgeom {

double max_abs(const RealTensor& t) {
  double m = 0.0;
  for (double x : t.data()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const RealTensor& a, const RealTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Eigen::MatrixXd value_matrix(const JetTensor& a) {
  Eigen::MatrixXd m(a.dim(0), a.dim(1));
  for (int i = 0; i < a.dim(0); ++i)
    for (int j = 0; j < a.dim(1); ++j) m(i, j) = a(i, j).value();
  return m;
}

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

JetTensor identity_jets(int n, int d, int order) {
  JetTensor r({n, n}, Jet(d, order));
  for (int i = 0; i < n; ++i) r(i, i).add_constant(1.0);
  return r;
}

JetTensor inverse(const JetTensor& a, const char* what) {
  const int n = a.dim(0);
  const Eigen::MatrixXd v = value_matrix(a);
  double cond = condition_number(v);
  if (!(cond <= kConditionLimit))
    throw DegenerateError(std::string(what) + " is degenerate (condition number " +
                          std::to_string(cond) + ")");
  const int d = a(0, 0).vars();
  int order = a(0, 0).order();
  for (const auto& j : a.data()) order = std::min(order, j.order());
  JetTensor m = truncate(a, order);
  JetTensor r = identity_jets(n, d, order);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(m(row, col).value()) > std::abs(m(piv, col).value())) piv = row;
    if (piv != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(m(piv, k), m(col, k));
        std::swap(r(piv, k), r(col, k));
      }
    }
    Jet inv = reciprocal(m(col, col));
    for (int k = 0; k < n; ++k) {
      m(col, k) = m(col, k) * inv;
      r(col, k) = r(col, k) * inv;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      Jet f = m(row, col);
      for (int k = 0; k < n; ++k) {
        m(row, k) -= f * m(col, k);
        r(row, k) -= f * r(col, k);
      }
    }
  }
  return r;
}

JetTensor cholesky(const JetTensor& a, const char* what) {
  const int n = a.dim(0);
  const int d = a(0, 0).vars();
  int order = a(0, 0).order();
  for (const auto& j : a.data()) order = std::min(order, j.order());
  JetTensor L({n, n}, Jet(d, order));
  for (int j = 0; j < n; ++j) {
    Jet s = a(j, j).truncate(order);
    for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    if (!(s.value() > 0.0))
      throw DegenerateError(std::string(what) + " is not positive definite");
    L(j, j) = sqrt(s);
    Jet inv = reciprocal(L(j, j));
    for (int i = j + 1; i < n; ++i) {
      Jet t = a(i, j).truncate(order);
      for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t * inv;
    }
  }
  return L;
}

JetTensor matmul(const JetTensor& a, const JetTensor& b) {
  const int n = a.dim(0), k = a.dim(1), m = b.dim(1);
  JetTensor r({n, m}, Jet(a(0, 0).vars(), std::min(a(0, 0).order(), b(0, 0).order())));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < k; ++l) r(i, j) += a(i, l) * b(l, j);
  return r;
}

JetTensor transpose(const JetTensor& a) {
  JetTensor r({a.dim(1), a.dim(0)}, a(0, 0));
  for (int i = 0; i < a.dim(0); ++i)
    for (int j = 0; j < a.dim(1); ++j) r(j, i) = a(i, j);
  return r;
}

}  // namespace dgeom
