// d-torsion, d-curvature, Ricci splits and Einstein residuals.
//
// Assembled tensors:
//   T(alpha, beta, gamma)      = Gamma^a_{bg} - Gamma^a_{gb} + W^a_{bg}
//   R(alpha, beta, gamma, tau) = R^alpha_{beta gamma tau}
//     = delta_tau Gamma^a_{b g} - delta_gamma Gamma^a_{b tau}
//       + Gamma^f_{b g} Gamma^a_{f tau} - Gamma^f_{b tau} Gamma^a_{f g}
//       + Gamma^a_{b f} W^f_{g tau}
#pragma once

#include "dgeom/connection.hpp"

namespace dgeom {

// The five torsion families under their conventional labels:
//   T_hh(i,j,k) = T^i_jk,   C_hv(i,j,a) = T^i_ja = C^i_ja,  S_vv(a,b,c) = S^a_bc,
//   T_vhh(a,i,j) = T^a_ij (= -Omega^a_ij),  T_vvh(a,b,i) = T^a_bi (= d_b N_i^a - L^a_bi).
// T^a_ij and T^a_bi are read with their two lower indices in the opposite
// order from the assembled tensor, i.e. T_vhh(a,i,j) = T(n+a, j, i) and
// T_vvh(a,b,i) = T(n+a, i, n+b).
struct TorsionPoint {
  BundleShape shape;
  RealTensor T_hh, C_hv, S_vv, T_vhh, T_vvh;
  RealTensor T;  // assembled, d x d x d
};

// Families R^i_{h.jk}, R^a_{b.jk}, P^i_{j.ka}, P^c_{b.ka}, S^i_{j.bc}, S^a_{b.cd},
// stored in that index order, plus the assembled tensor.
struct CurvaturePoint {
  BundleShape shape;
  RealTensor R_h, R_v, P_h, P_v, S_h, S_v;
  RealTensor R;  // d^4
};

struct RicciPoint {
  RealTensor R_ij;  // n x n
  RealTensor P2;    // n x m, 2P_ia = P^k_{i.ka}
  RealTensor P1;    // m x n, 1P_ai = P^b_{a.ib}
  RealTensor S_ab;  // m x m
  double Rhat = 0.0, S = 0.0, total = 0.0;
};

struct EinsteinSources {
  RealTensor ij, ab, ai, ia;  // empty tensors mean zero
};

struct EinsteinReport {
  RealTensor hh, vv, vh, hv;  // residual blocks (ij), (ab), (ai), (ia)
  double max_abs = 0.0;
};

TorsionPoint torsion_from(const RealTensor& Gamma, const RealTensor& W, BundleShape s);
RealTensor assemble_torsion(const TorsionPoint& t);

// R jets of order Gamma.order - 1; Gamma and W must share an order and G must
// carry N to at least that order.
JetTensor curvature_jets(const GeometryJets& G, const JetTensor& Gamma, const JetTensor& W);
CurvaturePoint curvature_point(const RealTensor& R, BundleShape s);

// The six families evaluated from their own displayed formulas (with the
// W-consistent sign of the C Omega terms), an independent route to the
// families extracted from the assembled tensor.  G needs order >= 2.
CurvaturePoint curvature_families_direct(const GeometryJets& G, const ConnectionSelector& sel);

// Full Ricci R_{beta gamma} = R^alpha_{beta gamma alpha}.
JetTensor ricci_jets(const JetTensor& R);
// G^{ab} R_ab with the adapted block metric; jets of the inverse blocks.
Jet scalar_jet(const JetTensor& ricci, const JetTensor& ginv, const JetTensor& hinv, BundleShape s);

RicciPoint ricci_scalar(const CurvaturePoint& c, const GeometryJets& G);

TorsionPoint d_torsion(const GeometrySource& src, const ConnectionSelector& sel,
                       std::span<const double> u);
CurvaturePoint d_curvature(const GeometrySource& src, const ConnectionSelector& sel,
                           std::span<const double> u);
EinsteinReport einstein_residual(const RicciPoint& r, const GeometryJets& G, double kappa,
                                 const EinsteinSources& src);
EinsteinReport einstein_residual(const GeometrySource& src, const ConnectionSelector& sel,
                                 double kappa, const EinsteinSources& sources,
                                 std::span<const double> u);
// The left-hand sides (Upsilon = 0); dividing by kappa gives self-consistent sources.
EinsteinSources einstein_blocks(const RicciPoint& r, const GeometryJets& G);

}  // namespace dgeom
