// Builtin example geometries, seeded sample points and random test fields.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dgeom/finsler.hpp"

namespace dgeom {

// Ids:
//   flat[:n,m]               identity blocks, N = 0 (default 2,2)
//   sphere2xflat[:r[,m]]     round 2-sphere of radius r (stereographic) times
//                            flat R^m, N = 0 (default r = 1, m = 2)
//   anisotropic              n = m = 2, y-dependent g with an off-diagonal
//                            entry, x-dependent h, N nonzero with Omega != 0
//   pure_gauge               n = m = 2, N_i^a = d_i phi^a(x) (Omega = 0) and h
//                            a function of y + phi(x)
//   blockdiag                n = m = 2, g(x) and h(y), N = 0
//   finsler:<spec>[@n]       Sasaki lift of a Finsler builtin (default n = 2)
std::shared_ptr<const GeometrySource> builtin_geometry(const std::string& id);
std::vector<std::string> builtin_geometry_ids();

std::shared_ptr<const GeometrySource> field_geometry(const std::vector<std::vector<std::string>>& g,
                                                     const std::vector<std::vector<std::string>>& h,
                                                     const std::vector<std::vector<std::string>>& N,
                                                     BundleShape s);

// x uniform in [x_min, x_max]^n; y along a normalized Gaussian direction with
// |y| uniform in [y_min, y_max].  Point i depends only on (seed, i).
struct SampleSpec {
  int count = 10;
  std::uint64_t seed = 1;
  double x_min = -1.0, x_max = 1.0;
  double y_min = 0.1, y_max = 2.0;
};

void validate(const SampleSpec& s);
std::vector<double> sample_point(BundleShape shape, const SampleSpec& spec, int index);
std::vector<std::vector<double>> sample_points(BundleShape shape, const SampleSpec& spec);

// Smooth random scalar fields mixing polynomial, trigonometric and
// exponential terms.
std::vector<ScalarField> random_test_fields(BundleShape shape, int count, std::uint64_t seed);

}  // namespace dgeom
