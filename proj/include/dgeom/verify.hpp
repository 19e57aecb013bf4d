// Verification suites: each module's identities evaluated on builtin examples
// at seeded sample points.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgeom/bundle.hpp"

namespace dgeom {

struct Check {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool lower_bound = false;  // pass means value > tol instead of value <= tol
  bool pass = false;
  std::string error;         // set when the check threw
};

struct VerifyOptions {
  // Omega as seen by the torsion/omega cross-check; swap it to inject faults.
  NCurvatureFn omega = &n_curvature_values;
  std::uint64_t seed = 7;
};

std::vector<std::string> verify_suite_names();

// "all" or one of verify_suite_names(); throws ConfigError otherwise.
std::vector<Check> verify_suite(const std::string& name, const VerifyOptions& opts = {});

// First failing check, or nullptr.
const Check* first_failure(const std::vector<Check>& checks);

}  // namespace dgeom
