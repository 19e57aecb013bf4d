// Finsler and Lagrange spaces on a tangent-bundle shape (m = n): the metric
// g[F]_ij = 1/2 d^2 F^2 / dy^i dy^j, the Cartan N-connection, the almost-complex
// structure and the 2-form theta = g_ij delta y^i ^ dx^j.
#pragma once

#include "dgeom/bundle.hpp"

namespace dgeom {

inline constexpr double kZeroSection = 1e-3;

class FinslerFunction {
public:
  // F given as a DSL expression on the (n, n) bundle.
  static FinslerFunction from_expr(const std::string& F, int n);
  // "euclidean", "quartic", "riemann[:g-spec]", "randers[:a-spec|b-spec]".
  // Matrix specs are rows separated by ';' with entries separated by ','.
  static FinslerFunction builtin(const std::string& id, int n);

  int n() const { return F_.shape().n; }
  BundleShape shape() const { return F_.shape(); }
  const std::string& name() const { return name_; }
  const ScalarField& F() const { return F_; }
  const ScalarField& F2() const { return F2_; }

  double value(std::span<const double> u) const;
  // Jet of F^2; throws DomainError on the zero section |y| < kZeroSection.
  Jet F2_jet(std::span<const double> u, int order) const;

private:
  FinslerFunction(std::string name, ScalarField F, ScalarField F2)
      : name_(std::move(name)), F_(std::move(F)), F2_(std::move(F2)) {}
  std::string name_;
  ScalarField F_, F2_;
};

struct FinslerMetricPoint {
  Eigen::MatrixXd g;
  int rank = 0;
  double min_eigenvalue = 0.0;
  bool positive_definite() const { return min_eigenvalue > 0.0; }
};

// y-Hessian of a scalar jet, halved: 1/2 d^2 L / dy^i dy^j, as jets of order
// L.order() - 2.
JetTensor half_y_hessian(const Jet& L, int n);

// Cartan coefficients N(i, j) = N^i_j as jets of order F2.order() - 4; u is
// the expansion point of F2.
JetTensor cartan_jets(const Jet& F2, int n, std::span<const double> u);

FinslerMetricPoint finsler_metric(const FinslerFunction& F, std::span<const double> u);
FinslerMetricPoint lagrange_metric(const ScalarField& L, std::span<const double> u);
Eigen::MatrixXd cartan_nconnection(const FinslerFunction& F, std::span<const double> u);
// max |F(x, s y) - s F(x, y)| over s in {0.5, 2, 3}.
double homogeneity_residual(const FinslerFunction& F, std::span<const double> u);

// Components of d(theta) in the holonomic co-basis; returns the largest.
double kahler_form_closure(const FinslerFunction& F, std::span<const double> u);

// The almost-complex structure in the adapted basis (delta_i, d/dy^i):
// I(delta_i) = -d/dy^i, I(d/dy^i) = delta_i.
Eigen::MatrixXd almost_complex_structure(int n);

// The Sasaki-type lift G = g[F] dx dx + g[F] delta y delta y with Cartan N.
class FinslerGeometry : public GeometrySource {
public:
  explicit FinslerGeometry(FinslerFunction F) : F_(std::move(F)) {}
  BundleShape shape() const override { return F_.shape(); }
  GeometryJets jets(std::span<const double> u, int order) const override;
  int max_order() const override { return kMaxJetOrder - 4; }
  std::string describe() const override { return "finsler:" + F_.name(); }
  const FinslerFunction& function() const { return F_; }

private:
  FinslerFunction F_;
};

}  // namespace dgeom
