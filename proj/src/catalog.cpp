#include "dgeom/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "dgeom/errors.hpp"

namespace dgeom {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Rows = std::vector<std::vector<std::string>>;

Rows identity_rows(int k) {
  Rows r(k, std::vector<std::string>(k, "0"));
  for (int i = 0; i < k; ++i) r[i][i] = "1";
  return r;
}


std::vector<double> parse_numbers(const std::string& arg, const std::string& id) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= arg.size()) {
    std::size_t next = arg.find(',', pos);
    std::string tok = arg.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad parameter '" + tok + "' in builtin '" + id + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

int as_dim(double v, const std::string& id) {
  if (v != std::floor(v)) throw ConfigError("dimension must be an integer in '" + id + "'");
  return static_cast<int>(v);
}

}  // namespace

std::shared_ptr<const GeometrySource> field_geometry(const Rows& g, const Rows& h, const Rows& N,
                                                     BundleShape s) {
  validate(s);
  auto M = DMetricField::parse(g, h, s);
  auto n = N.empty() ? NConnectionField::zero(s) : NConnectionField::parse(N, s);
  return std::make_shared<FieldGeometry>(std::move(M), std::move(n));
}

std::shared_ptr<const GeometrySource> builtin_geometry(const std::string& id) {
  const auto colon = id.find(':');
  const std::string kind = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);

  if (kind == "flat") {
    BundleShape s{2, 2};
    if (!arg.empty()) {
      auto v = parse_numbers(arg, id);
      if (v.size() != 2) throw ConfigError("flat takes 'n,m'");
      s = {as_dim(v[0], id), as_dim(v[1], id)};
    }
    validate(s);
    return field_geometry(identity_rows(s.n), identity_rows(s.m), {}, s);
  }
  if (kind == "sphere2xflat") {
    double r = 1.0;
    int m = 2;
    if (!arg.empty()) {
      auto v = parse_numbers(arg, id);
      if (v.size() > 2) throw ConfigError("sphere2xflat takes 'r[,m]'");
      r = v[0];
      if (v.size() == 2) m = as_dim(v[1], id);
    }
    if (!(r > 0.0)) throw ConfigError("sphere radius must be positive");
    BundleShape s{2, m};
    validate(s);
    const std::string c = "4*" + num(r * r) + "/(1+x1^2+x2^2)^2";
    return field_geometry({{c, "0"}, {"0", c}}, identity_rows(m), {}, s);
  }
  if (kind == "anisotropic") {
    if (!arg.empty()) throw ConfigError("anisotropic takes no parameters");
    return field_geometry({{"1+0.2*y1^2", "0.1*x1*y2"}, {"0.1*x1*y2", "1.5+0.1*x2^2"}},
                          {{"1+0.3*x1^2", "0.1*y1"}, {"0.1*y1", "2+0.1*y2^2"}},
                          {{"0.3*y1*x2", "0.1*y2"}, {"0.2*x1*y2", "-0.1*y1^2"}}, {2, 2});
  }
  if (kind == "pure_gauge") {
    if (!arg.empty()) throw ConfigError("pure_gauge takes no parameters");
    // phi^1 = x1 x2 + 0.5 sin(x1), phi^2 = 0.5 x1^2 - 0.2 x2^3
    const std::string z1 = "(y1+x1*x2+0.5*sin(x1))", z2 = "(y2+0.5*x1^2-0.2*x2^3)";
    return field_geometry({{"1+0.2*x1^2", "0.1*x1*x2"}, {"0.1*x1*x2", "1+0.3*x2^2"}},
                          {{"1+0.1*" + z1 + "^2", "0.05*" + z1 + "*" + z2},
                           {"0.05*" + z1 + "*" + z2, "1.5+0.1*" + z2 + "^2"}},
                          {{"x2+0.5*cos(x1)", "x1"}, {"x1", "-0.6*x2^2"}}, {2, 2});
  }
  if (kind == "blockdiag") {
    if (!arg.empty()) throw ConfigError("blockdiag takes no parameters");
    return field_geometry({{"1+0.2*x1^2", "0.1*x1*x2"}, {"0.1*x1*x2", "1+0.3*x2^2+0.1*sin(x1)"}},
                          {{"1+0.2*y1^2", "0.1*y1*y2"}, {"0.1*y1*y2", "1.5+0.3*y2^2"}}, {}, {2, 2});
  }
  if (kind == "finsler") {
    std::string spec = arg;
    int n = 2;
    const auto at = spec.rfind('@');
    if (at != std::string::npos) {
      auto v = parse_numbers(spec.substr(at + 1), id);
      if (v.size() != 1) throw ConfigError("finsler dimension suffix is '@n'");
      n = as_dim(v[0], id);
      spec = spec.substr(0, at);
    }
    if (spec.empty()) throw ConfigError("finsler builtin needs a function id");
    return std::make_shared<FinslerGeometry>(FinslerFunction::builtin(spec, n));
  }
  throw ConfigError("unknown builtin geometry '" + id + "'");
}

std::vector<std::string> builtin_geometry_ids() {
  return {"flat",         "sphere2xflat",       "anisotropic",     "pure_gauge",
          "blockdiag",    "finsler:euclidean",  "finsler:riemann", "finsler:quartic",
          "finsler:randers"};
}

void validate(const SampleSpec& s) {
  if (s.count < 1) throw ConfigError("sample count must be positive");
  if (!(s.x_min < s.x_max)) throw ConfigError("empty x box");
  if (!(0.0 <= s.y_min && s.y_min <= s.y_max)) throw ConfigError("bad y radius range");
}

std::vector<double> sample_point(BundleShape shape, const SampleSpec& spec, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(spec.x_min, spec.x_max), ur(spec.y_min, spec.y_max);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> u(shape.dim());
  for (int i = 0; i < shape.n; ++i) u[i] = ux(rng);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (int a = 0; a < shape.m; ++a) {
      u[shape.n + a] = gauss(rng);
      norm += u[shape.n + a] * u[shape.n + a];
    }
    norm = std::sqrt(norm);
  } while (norm < 1e-8);
  const double r = ur(rng);
  for (int a = 0; a < shape.m; ++a) u[shape.n + a] *= r / norm;
  return u;
}

std::vector<std::vector<double>> sample_points(BundleShape shape, const SampleSpec& spec) {
  validate(spec);
  std::vector<std::vector<double>> pts;
  pts.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) pts.push_back(sample_point(shape, spec, i));
  return pts;
}

std::vector<ScalarField> random_test_fields(BundleShape shape, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, shape.dim() - 1);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  auto var = [&] {
    int v = pick(rng);
    return v < shape.n ? "x" + std::to_string(v + 1) : "y" + std::to_string(v - shape.n + 1);
  };
  std::vector<ScalarField> out;
  for (int k = 0; k < count; ++k) {
    std::string e = num(c(rng)) + " + " + num(c(rng)) + "*" + var() + "*" + var() + " + " +
                    num(c(rng)) + "*sin(" + num(c(rng)) + "*" + var() + " + " + var() + ")" + " + " +
                    num(0.5 * c(rng)) + "*exp(" + num(0.5 * c(rng)) + "*" + var() + ")" + " + " +
                    num(0.3 * c(rng)) + "*" + var() + "^3";
    out.push_back(parse_field(e, shape));
  }
  return out;
}

}  // namespace dgeom
