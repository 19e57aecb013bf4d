// N-connection geometry on a bundle with coordinates u = (x^1..x^n, y^1..y^m).
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgeom/field_dsl.hpp"
#include "dgeom/tensor.hpp"

namespace dgeom {

// N_i^a(x, y), stored with the fiber index first: at(a, i).
struct NConnectionField {
  BundleShape shape;
  std::vector<ScalarField> N;  // m*n entries, row a, column i

  const ScalarField& at(int a, int i) const { return N[a * shape.n + i]; }
  static NConnectionField zero(BundleShape s);
  // Parse from rows of strings, rows[a][i].
  static NConnectionField parse(const std::vector<std::vector<std::string>>& rows, BundleShape s);
};

// Symmetric blocks g_ij and h_ab; only the upper triangle is stored.
struct DMetricField {
  BundleShape shape;
  std::vector<ScalarField> g;  // n(n+1)/2
  std::vector<ScalarField> h;  // m(m+1)/2

  const ScalarField& g_at(int i, int j) const;
  const ScalarField& h_at(int a, int b) const;
  static DMetricField identity(BundleShape s);
  // Full square string arrays; throws ConfigError when not symmetric as text.
  static DMetricField parse(const std::vector<std::vector<std::string>>& g,
                            const std::vector<std::vector<std::string>>& h, BundleShape s);
};

// Metric blocks and N-coefficients expanded as jets around one point.
struct GeometryJets {
  BundleShape shape;
  int order = 0;
  std::vector<double> u;
  JetTensor g;  // n x n
  JetTensor h;  // m x m
  JetTensor N;  // m x n, N(a, i) = N_i^a
};

// Anything that can produce the d-metric blocks and N-coefficients as jets.
class GeometrySource {
public:
  virtual ~GeometrySource() = default;
  virtual BundleShape shape() const = 0;
  virtual GeometryJets jets(std::span<const double> u, int order) const = 0;
  // Highest geometry jet order this source can deliver.
  virtual int max_order() const { return kMaxJetOrder; }
  virtual std::string describe() const = 0;
};

class FieldGeometry : public GeometrySource {
public:
  FieldGeometry(DMetricField metric, NConnectionField n);
  BundleShape shape() const override { return metric_.shape; }
  GeometryJets jets(std::span<const double> u, int order) const override;
  std::string describe() const override { return "fields"; }
  const DMetricField& metric() const { return metric_; }
  const NConnectionField& nconnection() const { return n_; }

private:
  DMetricField metric_;
  NConnectionField n_;
};

// N-elongated derivative delta_alpha of a jet: d_i - N_i^b d_b for alpha < n,
// d_a otherwise.  Result has order f.order() - 1 (or less if N is shorter).
Jet elongated(const GeometryJets& G, const Jet& f, int alpha);

// Columns are the adapted frame vectors: e(beta, alpha) is the d_beta
// component of delta_alpha.  e_inv is its inverse; its rows are the co-frame
// (dx^i, delta y^a = dy^a + N_i^a dx^i) in the holonomic co-basis.
struct FramePoint {
  Eigen::MatrixXd e;
  Eigen::MatrixXd e_inv;
};

// W(gamma, alpha, beta) with [delta_alpha, delta_beta] = W^gamma_{alpha beta} delta_gamma.
struct AnholonomyPoint {
  RealTensor W;
};

// Omega(a, i, j) = Omega^a_{ij}.
struct NCurvaturePoint {
  RealTensor Omega;
};

FramePoint adapted_frame(const NConnectionField& N, std::span<const double> u);
AnholonomyPoint anholonomy(const NConnectionField& N, std::span<const double> u);
NCurvaturePoint n_curvature(const NConnectionField& N, std::span<const double> u);
Eigen::MatrixXd offdiagonal_metric(const DMetricField& M, const NConnectionField& N,
                                   std::span<const double> u);
// N'^{a'}_i = M^{a'}_a N_i^a - (d_i M^{a'}_a) y^a for a pure fiber transform
// y'^{a'} = M^{a'}_a(x) y^a; M given row a', column a.
RealTensor n_transform(const NConnectionField& N, const std::vector<ScalarField>& M,
                       std::span<const double> u);

// Jet-level versions used by the downstream pipeline.  Input N has order K,
// outputs have order K - 1.
JetTensor anholonomy_jets(const GeometryJets& G);
JetTensor n_curvature_jets(const GeometryJets& G);

// Omega computed from N-jets; exposed as a replaceable hook for the
// verification suite's mutation test.
using NCurvatureFn = RealTensor (*)(const GeometryJets&);
RealTensor n_curvature_values(const GeometryJets& G);

}  // namespace dgeom
