// Configuration, point sweeps and JSON reports behind the command-line tool.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "dgeom/catalog.hpp"
#include "dgeom/curvature.hpp"
#include "dgeom/ncalg.hpp"
#include "dgeom/verify.hpp"

namespace dgeom {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

using ordered_json = nlohmann::ordered_json;

struct ComputeToggles {
  bool metricity = true;
  bool anholonomy = true;
  bool torsion = true;
  bool curvature = true;
  bool ricci = true;
  bool einstein = false;
  bool spectral = false;
  bool finsler = false;
  bool gauge = false;
};

struct EinsteinSpec {
  double kappa = 1.0;
  // Source blocks as field rows; empty means zero.
  std::vector<std::vector<ScalarField>> ij, ab, ai, ia;
};

struct SpectralSpec {
  double Lambda = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
};

struct GaugeSpec {
  double l0 = 1.0;
  double lambda = 1.0;
};

struct RunConfig {
  ordered_json echo;  // the parsed input, normalized
  BundleShape shape;
  std::shared_ptr<const GeometrySource> geometry;
  std::optional<FinslerFunction> finsler;
  ConnectionSelector connection;
  SampleSpec samples;
  ComputeToggles compute;
  EinsteinSpec einstein;
  SpectralSpec spectral;
  GaugeSpec gauge;
  int threads = 1;
  double max_degenerate_fraction = 0.1;
  bool full_tensors = false;  // include whole connection/torsion/curvature arrays
};

// Throws ConfigError for schema problems and ParseError for malformed JSON or
// field expressions.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Overrides from the command line; re-validates.
void set_points(RunConfig& cfg, int count);
void set_seed(RunConfig& cfg, std::uint64_t seed);

struct RunResult {
  ordered_json report;
  int status = 0;  // 0 ok, 1 an invariant failed, 4 degeneracy or non-finite output
  std::string message;
};

RunResult run_report(const RunConfig& cfg);

// True when every number in j is finite.
bool all_finite(const ordered_json& j);

// Report serialization used by every command.
std::string dump_report(const ordered_json& j);

// dgeom finsler: metric, Cartan N-connection and closure diagnostics of F at
// seeded points.
RunResult finsler_report(const std::string& F, int n, int points, std::uint64_t seed);

// dgeom star.  structure_json is the content of a structure-constant file.
struct StarRequest {
  std::string product;  // moyal | lie | qplane
  std::string lhs, rhs;
  std::string theta_csv;
  std::string structure_json;
  std::string q;        // complex literal
  std::string ordering = "normal";
  int lie_order = 2;
};
RunResult star_report(const StarRequest& req);

// dgeom sw.
RunResult sw_report(const std::string& json_text);

// dgeom verify.
RunResult verify_report(const std::string& suite, const VerifyOptions& opts = {});

// Lie structure from JSON: {"dim": S, "f": [[a, b, c, value], ...]} with the
// antisymmetric partner filled in, or the names "su2" / "desitter".
LieStructure parse_structure(const nlohmann::json& j);

}  // namespace dgeom
