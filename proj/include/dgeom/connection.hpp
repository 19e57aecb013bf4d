// d-connections: canonical, Levi-Civita in the adapted basis, user-supplied.
//
// Full coefficients Gamma(alpha, beta, gamma) = Gamma^alpha_{beta gamma} with
// gamma the direction of differentiation: D_gamma delta_beta =
// Gamma^alpha_{beta gamma} delta_alpha.  A d-connection fills only the blocks
// Gamma^i_jk = L^i_jk, Gamma^a_bk = L^a_bk, Gamma^i_jc = C^i_jc,
// Gamma^a_bc = C^a_bc (horizontal indices first, then fiber indices).
#pragma once

#include <memory>

#include "dgeom/bundle.hpp"

namespace dgeom {

struct DConnectionPoint {
  BundleShape shape;
  RealTensor L_hh;    // n x n x n, L^i_{jk}
  RealTensor L_vv_h;  // m x m x n, L^a_{bk}
  RealTensor C_hh_v;  // n x n x m, C^i_{jc}
  RealTensor C_vv_v;  // m x m x m, C^a_{bc}
};

// N^a_{bi} = d N_i^a / d y^b, stored (a, b, i).
struct NLinearPoint {
  RealTensor Gamma_N;
};

// User-provided coefficient fields, same layout as DConnectionPoint.
struct UserConnection {
  BundleShape shape;
  std::vector<ScalarField> L_hh, L_vv_h, C_hh_v, C_vv_v;
};

enum class ConnectionKind { Canonical, LeviCivita, User };

struct ConnectionSelector {
  ConnectionKind kind = ConnectionKind::Canonical;
  std::shared_ptr<const UserConnection> user;

  static ConnectionSelector canonical() { return {}; }
  static ConnectionSelector levi_civita() { return {ConnectionKind::LeviCivita, nullptr}; }
  static ConnectionSelector from_user(std::shared_ptr<const UserConnection> u) {
    return {ConnectionKind::User, std::move(u)};
  }
};

const char* to_string(ConnectionKind k);

// Full Gamma as jets of order G.order - 1.
JetTensor connection_jets(const GeometryJets& G, const ConnectionSelector& sel);

DConnectionPoint split_families(const RealTensor& Gamma, BundleShape s);
RealTensor assemble(const DConnectionPoint& c);

DConnectionPoint canonical_dconnection(const GeometrySource& src, std::span<const double> u);
DConnectionPoint levi_civita_anholonomic(const GeometrySource& src, std::span<const double> u);
NLinearPoint n_linear_connection(const NConnectionField& N, std::span<const double> u);

// max |D_gamma g_{alpha beta}| for the block-diagonal adapted metric diag(g, h)
// and the given full connection values.  G needs order >= 1.
double metric_compatibility_residual(const RealTensor& Gamma, const GeometryJets& G);
double metric_compatibility_residual(const DConnectionPoint& conn, const GeometrySource& src,
                                     std::span<const double> u);

}  // namespace dgeom
