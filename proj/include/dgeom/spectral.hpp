// Euclidean Clifford data over the adapted frame, the spin-lifted d-connection,
// the Dirac d-operator and the heat-kernel densities of its square.
//
// Conventions: Hermitian gammas with {g^a, g^b} = +2 delta^ab.  The vielbein E
// satisfies G = E E^T for the adapted block metric G = diag(g, h); frame
// vectors are e_a = (E^-1)(a, alpha) delta_alpha, the co-frame is E(alpha, a).
#pragma once

#include <complex>

#include "dgeom/curvature.hpp"

namespace dgeom {

using cdouble = std::complex<double>;

// When false, the "60 R E" term of a4 uses the horizontal scalar Rhat instead
// of the full scalar curvature.
inline constexpr bool kA4RETermUsesScalarR = true;

struct GammaSet {
  int dim = 0;
  std::vector<Eigen::MatrixXcd> g;  // flat generators, 2^(d/2) square
  int spinor_dim() const { return g.empty() ? 0 : static_cast<int>(g[0].rows()); }
};

GammaSet gammas(int d);

enum class VielbeinKind { Cholesky, Symmetric };

struct VielbeinPoint {
  Eigen::MatrixXd e_h, e_v;  // e_h e_h^T = g, e_v e_v^T = h
  Eigen::MatrixXd full() const;
};

VielbeinPoint vielbein(const Eigen::MatrixXd& g, const Eigen::MatrixXd& h,
                       VielbeinKind kind = VielbeinKind::Cholesky);
VielbeinPoint vielbein(const DMetricField& M, std::span<const double> u,
                       VielbeinKind kind = VielbeinKind::Cholesky);

// gamma^alpha = gamma^a e_a^alpha.
std::vector<Eigen::MatrixXcd> gamma_frame(const GammaSet& flat, const VielbeinPoint& V);

// Vielbein, spin connection and curved gammas as jets.  Geometry jets of
// order K give E, E^-1 and curved gammas at order K, the connection and the
// spin connection at order K - 1.
struct SpinJets {
  BundleShape shape;
  GammaSet flat;
  JetTensor E, Einv;  // d x d
  JetTensor Gamma;    // full d-connection
  JetTensor omega;    // omega(a, b, mu) = Gamma^a_{b mu} in the orthonormal frame
  std::vector<std::vector<CJet>> gamma;  // gamma[alpha][s * S + t]
  std::vector<std::vector<CJet>> spin;   // Gamma^S_mu, same layout
};

SpinJets spin_jets(const GeometryJets& G, const ConnectionSelector& sel);

struct SpinConnectionPoint {
  RealTensor omega;                       // (a, b, mu)
  std::vector<Eigen::MatrixXcd> matrices;  // Gamma^S_mu = 1/2 sum_{a<b} omega_{ab mu} g^a g^b
};

SpinConnectionPoint spin_connection(const GeometrySource& src, const ConnectionSelector& sel,
                                    std::span<const double> u);
// max |D_mu e_b - omega^a_{b mu} e_a| over all components.
double spin_defining_residual(const SpinJets& s, const GeometryJets& G);
// max |delta_mu gamma^alpha + Gamma^alpha_{nu mu} gamma^nu + [Gamma^S_mu, gamma^alpha]|.
double gamma_covariance_residual(const SpinJets& s, const GeometryJets& G);

using SpinorJet = std::vector<CJet>;

struct SpinorField {
  std::vector<ScalarField> re, im;  // im may be empty
  SpinorJet eval_jet(std::span<const double> u, int order) const;
};

// D psi = gamma^alpha (delta_alpha + Gamma^S_alpha) psi.  The result is one
// order below the smaller of psi and the curved gammas.
SpinorJet dirac_jets(const SpinorJet& psi, const GeometryJets& G, const SpinJets& s);
std::vector<cdouble> dirac_apply(const SpinorField& psi, const GeometrySource& src,
                                 const ConnectionSelector& sel, std::span<const double> u);

struct SpectralDensities {
  double a0 = 0.0, a2 = 0.0, a4 = 0.0;
  double E = 0.0;         // R / 4
  double R = 0.0;         // full scalar curvature
  double Rhat = 0.0;
  double ricci2 = 0.0, riemann2 = 0.0, laplace_R = 0.0;
  double sqrt_G = 0.0;    // sqrt(det g det h)
  int trace_I = 0;
};

// Pulls geometry jets of order 4 from the source (D^2 R needs R to order 2).
SpectralDensities seeley_densities(const GeometrySource& src, const ConnectionSelector& sel,
                                   double Lambda, std::span<const double> u,
                                   VielbeinKind kind = VielbeinKind::Cholesky);

struct CutoffMoments {
  double f0 = 0.5, f2 = 1.0;
};

// Moments of chi~(z) = chi(z) - alpha chi(beta z) with chi the characteristic
// function of [0, 1]; alpha = 0 gives the plain cutoff.
CutoffMoments cutoff_moments(double alpha, double beta);

struct QuadraturePoint {
  std::vector<double> u;
  double weight = 1.0;
};

struct SpectralAction {
  CutoffMoments f;
  double lambda4 = 0.0;  // coefficient of Lambda^4
  double lambda2 = 0.0;  // coefficient of Lambda^2
  double value = 0.0;    // lambda4 Lambda^4 + lambda2 Lambda^2
};

SpectralAction spectral_action(const GeometrySource& src, const ConnectionSelector& sel,
                               double Lambda, double alpha, double beta,
                               const std::vector<QuadraturePoint>& grid);

}  // namespace dgeom
