// de Sitter gauge algebra, the nonlinearly realized potential, gauge
// curvature and Lagrangian density, and the first-order Seiberg-Witten data.
//
// Conventions: Hermitian generators I^a with [I^a, I^b] = i f^{ab}_c I^c, gauge
// fields Q_mu = q_{mu,a} I^a, variations delta q = d gamma + i[gamma, q] and
// R_{tau mu} = d_tau Q_mu - d_mu Q_tau - i[Q_tau, Q_mu].  For a real matrix
// algebra with basis T^a one takes I^a = i T^a, so f equals the real structure
// constants and R_a T^a = dA + A ^ A for A = q_a T^a.
#pragma once

#include <array>

#include "dgeom/curvature.hpp"
#include "dgeom/ncalg.hpp"

namespace dgeom {

struct DeSitterAlgebra {
  std::array<int, 5> eta{1, 1, 1, 1, 1};
  double l = 1.0;
  // M[A * 5 + B] = M_AB with (M_AB)^C_D = eta_AD delta^C_B - eta_BD delta^C_A.
  std::vector<Eigen::MatrixXd> M;
  // Basis used for structure constants: F_ab (a < b < 4, six of them) then
  // P_a = l^-1 M_5a (four).
  std::vector<Eigen::MatrixXd> T;
  std::vector<std::string> labels;
  LieStructure structure;  // f^{ab}_c, equal to the real constants of T

  const Eigen::MatrixXd& generator(int A, int B) const { return M[A * 5 + B]; }
  int F_index(int a, int b) const;  // a != b, sign not included
  static constexpr int kP = 6;      // P_a sits at kP + a
};

// Throws ConfigError unless every entry is +1 or -1 and l > 0.
DeSitterAlgebra desitter_algebra(const std::array<int, 5>& eta, double l);

// Largest deviation over the 45 pairs of distinct M_AB (A < B) from the
// M-commutation relations.
double desitter_commutator_residual(const DeSitterAlgebra& A);

struct SplitResiduals {
  double ff = 0.0;  // [F, F]
  double pp = 0.0;  // [P_a, P_b] = eta_55 l^-2 F_ab
  double pf = 0.0;  // [P_a, F_bc] = eta_ac P_b - eta_ab P_c
};
SplitResiduals desitter_split_residuals(const DeSitterAlgebra& A);

// Jacobi identity on the matrices themselves, every triple of basis elements.
double desitter_matrix_jacobi(const DeSitterAlgebra& A);

struct GaugeConstants {
  double l0 = 1.0;
  double lambda = 1.0;
  double lambda1() const { return -3.0 / l0; }
  double l2() const { return 2.0 * l0 * l0 * lambda; }
};

// Pointwise input of the nonlinear realization: the so(4)-valued omega and the
// R^4-valued theta~ per direction mu, the coset section t = (t^a, t^5) and its
// derivatives dt(A, mu).
struct CosetData {
  std::array<int, 5> eta{1, 1, 1, 1, -1};
  std::vector<Eigen::Matrix4d> omega;
  std::vector<Eigen::Vector4d> theta_tilde;
  Eigen::Matrix<double, 5, 1> t;
  Eigen::MatrixXd dt;  // 5 x directions
};

// Bordered 5x5 matrix per direction: Gamma^a_b block, theta^a in the last
// column, theta_b = eta_bc theta^c in the last row, zero corner.
std::vector<Eigen::MatrixXd> nonlinear_potential(const CosetData& c);
// The same object from b^-1 Omega~ b + b^-1 db with the matrices themselves.
std::vector<Eigen::MatrixXd> dressed_potential(const CosetData& c);
Eigen::MatrixXd coset_matrix(const std::array<int, 5>& eta, const Eigen::Matrix<double, 5, 1>& t);

// Level-1 data: q1 (direction mu, generator a) and gamma1 (a) as fields.
struct GaugeLevel1 {
  BundleShape shape;
  int S = 0;
  std::vector<ScalarField> q1;      // mu * S + a
  std::vector<ScalarField> gamma1;  // may be empty when only q1 matters

  const ScalarField& q(int mu, int a) const { return q1[mu * S + a]; }
  static GaugeLevel1 parse(const std::vector<std::vector<std::string>>& q,
                           const std::vector<std::string>& gamma, BundleShape s);
};

struct GaugeJets {
  JetTensor q;      // (d, S)
  JetTensor gamma;  // (S), may be empty
  int dim() const { return q.dim(0); }
  int S() const { return q.dim(1); }
};

GaugeJets gauge_jets(const GaugeLevel1& f, std::span<const double> u, int order);
JetTensor parameter_jets(const std::vector<ScalarField>& gamma, std::span<const double> u, int order);

// R1(tau, mu, b) = d_tau q_mu,b - d_mu q_tau,b + f^{ec}_b q_tau,e q_mu,c.
JetTensor gauge_curvature_jets(const JetTensor& q, const LieStructure& L);
RealTensor gauge_curvature(const GaugeLevel1& f, const LieStructure& L, std::span<const double> u);

// delta q(mu, a) = d_mu gamma_a - f^{bc}_a gamma_b q_mu,c.
JetTensor gauge_variation_jets(const JetTensor& q, const JetTensor& gamma, const LieStructure& L);
RealTensor gauge_variation(const GaugeLevel1& f, const LieStructure& L, std::span<const double> u);

// Level-2 coefficients, symmetrized in (a, b):
//   gamma2_ab = 1/2 theta^{nu mu} (d_nu gamma_a) q_mu,b
//   q2_mu,ab  = -1/2 theta^{nu tau} q_nu,a (d_tau q_mu,b + R1_tau mu,b)
struct GaugeLevel2 {
  RealTensor q2;      // (mu, a, b)
  RealTensor gamma2;  // (a, b), empty without gamma1
};

GaugeLevel2 sw_expand(const GaugeJets& f, const ThetaMatrix& th, const LieStructure& L);
GaugeLevel2 sw_expand(const GaugeLevel1& f, const ThetaMatrix& th, const LieStructure& L,
                      std::span<const double> u);

// R = R1_a I^a + R2_ab I^a I^b with R2 the theta term, symmetrized in (a, b):
//   R2 = theta^{mu nu} (R1_tau mu,a R1_lambda nu,b
//        - 1/2 q_mu,a (D_nu R1_tau lambda,b + d_nu R1_tau lambda,b))
struct CorrectedCurvature {
  RealTensor R1;  // (tau, lambda, a)
  RealTensor R2;  // (tau, lambda, a, b)
};

CorrectedCurvature corrected_curvature(const GaugeJets& f, const ThetaMatrix& th,
                                       const LieStructure& L);
CorrectedCurvature corrected_curvature(const GaugeLevel1& f, const ThetaMatrix& th,
                                       const LieStructure& L, std::span<const double> u);

// Hermitian matrices realizing a LieStructure.
struct GaugeRepresentation {
  LieStructure L;
  std::vector<Eigen::MatrixXcd> I;
  int size() const { return I.empty() ? 0 : static_cast<int>(I[0].rows()); }
  // max |[I^a, I^b] - i f^{ab}_c I^c|
  double bracket_residual() const;
  static GaugeRepresentation desitter(const DeSitterAlgebra& A);
  static GaugeRepresentation su2();
};

// Enveloping-algebra matrix sum_a c_a I^a + sum_ab c_ab I^a I^b.
Eigen::MatrixXcd envelope(const GaugeRepresentation& rep, const std::vector<double>& c1,
                          const std::vector<double>& c2 = {});

// Gauge-equivalence residual of the first-order map under the first-order
// Moyal product, evaluated with theta scaled by each factor.  Terms of order
// theta^0 and theta^1 cancel identically; what remains is O(theta^2).
struct SwResidual {
  std::vector<double> scales;
  std::vector<double> residuals;
  double order0 = 0.0, order1 = 0.0;  // exact coefficients (should vanish)
  double slope = 0.0;                 // least-squares log-log slope
};
SwResidual sw_residual(const GaugeJets& f, const ThetaMatrix& th, const GaugeRepresentation& rep,
                       const std::vector<double>& scales = {1.0, 0.5, 0.25});

// Composition law for two parameters, through order theta: the commutative
// closure on q1 and the consistency of the enveloping parameters,
// delta_g L_s - delta_s L_g + i[L_s *, L_g] = L_{i[s, g]}.
struct ClosureResidual {
  double level1 = 0.0;
  double order_theta = 0.0;
  double max() const { return std::max(level1, order_theta); }
};
ClosureResidual closure_check(const JetTensor& q, const JetTensor& gamma, const JetTensor& varsigma,
                              const ThetaMatrix& th, const GaugeRepresentation& rep);

// delta_gamma R^ - i[Gamma^ *, R^] through order theta.
double covariance_residual(const GaugeJets& f, const ThetaMatrix& th, const GaugeRepresentation& rep);

// Matrix form of the corrected curvature (first-order map), for comparison
// with the coefficient form.
std::vector<Eigen::MatrixXcd> corrected_curvature_matrix(const GaugeJets& f, const ThetaMatrix& th,
                                                         const GaugeRepresentation& rep, int tau,
                                                         int lambda);

// Frame data for the gauge Lagrangian: torsion T(a, mu, nu) and curvature
// R(a, b, mu, nu) with the first indices in an orthonormal co-frame, form
// indices in the adapted basis.
struct GaugeStrength {
  int dim = 0;
  RealTensor T;
  RealTensor R;
  double scalar = 0.0;   // full scalar curvature R-hat + S
  Eigen::MatrixXd Ginv;  // adapted inverse metric
  double sqrt_G = 0.0;
};

GaugeStrength gauge_strength(const GeometrySource& src, const ConnectionSelector& sel,
                             std::span<const double> u);

// (1/2l^2) T.T + (1/8 lambda) R^a_b.R^b_a - (1/l^2)(R - 2 lambda1), times sqrt|G|.
double lagrangian_density(const GaugeStrength& s, const GaugeConstants& C);

// Bordered potential [[omega, l0^-1 chi], [l0^-1 chi^T, 0]] of a d-geometry
// with n + m = 4, its de Sitter curvature and the d-curvature it should
// reproduce.  The bridge algebra has eta = diag(1, 1, 1, 1, -1).
struct BridgeReport {
  RealTensor gauge_F, geometry_F;  // (a, b, mu, nu), adapted form indices
  RealTensor gauge_T, geometry_T;  // (a, mu, nu), the last column
  double projection_residual = 0.0;
  double curvature_residual = 0.0;
  double torsion_residual = 0.0;
};

BridgeReport gauge_geometry_bridge(const GeometrySource& src, const ConnectionSelector& sel,
                                   double l0, std::span<const double> u);

}  // namespace dgeom
