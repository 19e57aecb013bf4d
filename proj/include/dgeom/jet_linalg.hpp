// Dense linear algebra over jets: every entry is a truncated Taylor series, so
// the results carry derivatives of inverses and factors exactly.
#pragma once

#include <Eigen/Dense>

#include "dgeom/tensor.hpp"

namespace dgeom {

inline constexpr double kConditionLimit = 1e8;

Eigen::MatrixXd value_matrix(const JetTensor& a);

// 2-norm condition number of a small matrix (infinity when singular).
double condition_number(const Eigen::MatrixXd& a);

// Inverse by Gauss-Jordan elimination, pivoting on the constant terms.
// Throws DegenerateError when the value matrix has condition number above
// kConditionLimit; `what` names the block in the message.
JetTensor inverse(const JetTensor& a, const char* what = "matrix");

// Lower-triangular L with L L^T = a.  Throws DegenerateError unless a is
// positive definite.
JetTensor cholesky(const JetTensor& a, const char* what = "matrix");

JetTensor matmul(const JetTensor& a, const JetTensor& b);
JetTensor transpose(const JetTensor& a);
JetTensor identity_jets(int n, int d, int order);

}  // namespace dgeom
