// Complex polynomials and three star products on them: canonical (Moyal),
// Lie-type through the truncated BCH kernel, and the two-variable quantum plane.
#pragma once

#include <complex>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dgeom/errors.hpp"

namespace dgeom {

using cdouble = std::complex<double>;
using Exponent = std::vector<int>;

class Poly {
public:
  Poly() = default;
  explicit Poly(int nvars) : n_(nvars) {}
  static Poly constant(int nvars, cdouble c);
  static Poly var(int nvars, int v, cdouble c = 1.0);
  static Poly monomial(const Exponent& e, cdouble c);

  int nvars() const { return n_; }
  const std::map<Exponent, cdouble>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int degree() const;

  // Adds c to the coefficient of e and drops the entry if it cancels exactly.
  void add(const Exponent& e, cdouble c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(cdouble s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, cdouble s) { return a *= s; }
  friend Poly operator*(cdouble s, Poly a) { return a *= s; }
  // Commutative pointwise product.
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const { return *this * cdouble(-1.0); }

  Poly derivative(int v) const;
  Poly conj() const;
  cdouble eval(const std::vector<cdouble>& u) const;
  // Same polynomial viewed in more variables (new ones appended).
  Poly widen(int nvars) const;

  std::string to_string() const;

private:
  int n_ = 0;
  std::map<Exponent, cdouble> t_;
};

double max_abs_diff(const Poly& a, const Poly& b);

// Literal syntax: sums of products of complex numbers (2, 1.5e-3, i, 2i,
// (1+2i)), variables u1..u9 (u and v alias u1 and u2) with integer powers,
// and parenthesized sub-expressions.  nvars < 0 sizes the result to the
// highest variable used.
Poly parse_poly(const std::string& text, int nvars = -1);

struct ThetaMatrix {
  Eigen::MatrixXd theta;
  int size() const { return static_cast<int>(theta.rows()); }
  // Upper-triangle entries row by row (N(N-1)/2 values) or the full N x N.
  static ThetaMatrix from_csv(const std::string& csv, int N);
  static ThetaMatrix from_matrix(const Eigen::MatrixXd& m);
};

struct LieStructure {
  int dim = 0;
  std::vector<double> f;  // f^{ab}_c at (a * dim + b) * dim + c
  double& at(int a, int b, int c) { return f[(a * dim + b) * dim + c]; }
  double at(int a, int b, int c) const { return f[(a * dim + b) * dim + c]; }

  static LieStructure zero(int dim);
  static LieStructure su2();
  // u^1..u^N plus a central z = u^{N+1} with [u^i, u^j] = i theta^{ij} z.
  static LieStructure heisenberg(const ThetaMatrix& th);

  double antisymmetry_residual() const;
  double jacobi_residual() const;
};

inline constexpr int kMaxLieStarOrder = 2;

Poly moyal_star(const Poly& f, const Poly& g, const ThetaMatrix& th);
// Truncated at `order` (1 or 2) in the structure constants.
Poly lie_star(const Poly& f, const Poly& g, const LieStructure& L, int order = kMaxLieStarOrder);

enum class QPlaneOrdering { Normal, Symmetric };
// Normal: monomials u^a v^b with vu = q^-1 uv.  Symmetric: the Weyl-type rule
// (u^a v^b)(u^c v^d) = q^{(ad - bc)/2} u^{a+c} v^{b+d}.
Poly qplane_star(const Poly& f, const Poly& g, cdouble q,
                 QPlaneOrdering ord = QPlaneOrdering::Normal);
// Re-expresses a symmetric-ordered symbol as a normal-ordered one.
Poly qplane_symmetric_to_normal(const Poly& f, cdouble q);

struct MoyalProduct {
  ThetaMatrix theta;
};
struct LieProduct {
  LieStructure L;
  int order = kMaxLieStarOrder;
};
struct QPlaneProduct {
  cdouble q = 1.0;
  QPlaneOrdering ordering = QPlaneOrdering::Normal;
};
using StarProduct = std::variant<MoyalProduct, LieProduct, QPlaneProduct>;

Poly star(const Poly& f, const Poly& g, const StarProduct& p);
Poly star_commutator(const Poly& f, const Poly& g, const StarProduct& p);

}  // namespace dgeom
