#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dgeom/app.hpp"
#include "dgeom/errors.hpp"
#include "dgeom/verify.hpp"

using namespace dgeom;

namespace {
std::string cfg_path(const char* name) { return std::string(DGEOM_CONFIG_DIR) + "/" + name; }

RealTensor negated_omega(const GeometryJets& G) {
  RealTensor t = n_curvature_values(G);
  for (auto& v : t.data()) v = -v;
  return t;
}

const char* kField = R"({
  "shape": {"n": 2, "m": 2},
  "geometry": {"g": [["1+0.1*x1^2", "0"], ["0", "1"]], "h": [["1", "0"], ["0", "1+0.2*y2^2"]],
               "N": [["x2*y1", "0"], ["0", "0.1*y2"]]},
  "samples": {"count": 6, "seed": 9},
  "compute": ["metricity", "anholonomy", "torsion", "curvature", "ricci"]
})";
}  // namespace

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), ParseError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "torus"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "flat"}, "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "flat"}, "samples": {"count": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "flat"}, "threads": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "flat"}, "compute": ["magic"]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": {"builtin": "flat"}, "compute": ["finsler"]})"), ConfigError);
  EXPECT_THROW(load_config(cfg_path("missing.json")), ConfigError);
  try {
    parse_config(R"({"shape": {"n": 2, "m": 2}, "geometry": {"g": [["1+*x1", "0"], ["0", "1"]],
                   "h": [["1", "0"], ["0", "1"]], "N": [["0", "0"], ["0", "0"]]}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("geometry.g[0][0]"), std::string::npos) << e.what();
  }
}

TEST(Report, TopLevelKeysAndPoints) {
  RunConfig c = parse_config(kField);
  RunResult r = run_report(c);
  EXPECT_EQ(r.status, 0) << r.message;
  std::vector<std::string> keys;
  for (auto it = r.report.begin(); it != r.report.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"config", "points", "summary", "version"}));
  EXPECT_EQ(r.report["points"].size(), 6u);
  EXPECT_TRUE(all_finite(r.report));
  EXPECT_TRUE(r.report["summary"]["pass"].get<bool>());
}

TEST(Report, ThreadCountDoesNotChangeOutput) {
  RunConfig a = load_config(cfg_path("sphere_einstein.json"));
  RunConfig b = a;
  a.threads = 1;
  b.threads = 6;
  set_points(a, 12);
  set_points(b, 12);
  EXPECT_EQ(dump_report(run_report(a).report), dump_report(run_report(b).report));
  set_seed(b, 99);
  EXPECT_NE(dump_report(run_report(a).report), dump_report(run_report(b).report));
}

TEST(Report, SphereEinsteinScalar) {
  RunConfig c = load_config(cfg_path("sphere_einstein.json"));
  RunResult r = run_report(c);
  ASSERT_EQ(r.status, 0) << r.message;
  for (const auto& p : r.report["points"]) EXPECT_NEAR(p["ricci"]["Rhat"].get<double>(), 2.0 / (1.5 * 1.5), 1e-8);
}

TEST(Report, DegeneratePointsCounted) {
  RunConfig c = parse_config(R"({
    "shape": {"n": 2, "m": 2},
    "geometry": {"g": [["x1^2", "0"], ["0", "1"]], "h": [["1", "0"], ["0", "1"]], "N": [["0", "0"], ["0", "0"]]},
    "samples": {"count": 10, "seed": 3, "x_box": [-1e-5, 1e-5]}})");
  RunResult r = run_report(c);
  EXPECT_EQ(r.status, 4);
  EXPECT_EQ(r.report["summary"]["degenerate"].get<int>(), 10);
  for (const auto& p : r.report["points"]) EXPECT_EQ(p["status"], "degenerate");
}

TEST(Verify, MutatedOmegaIsCaught) {
  auto clean = verify_suite("bundle");
  EXPECT_EQ(first_failure(clean), nullptr);
  VerifyOptions o;
  o.omega = &negated_omega;
  auto bad = verify_suite("all", o);
  const Check* f = first_failure(bad);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->name, "torsion/omega cross-check");
  EXPECT_THROW(verify_suite("nope"), ConfigError);
}

TEST(Verify, AllSuitesPass) {
  for (const auto& name : verify_suite_names()) {
    auto checks = verify_suite(name);
    EXPECT_FALSE(checks.empty());
    const Check* f = first_failure(checks);
    EXPECT_EQ(f, nullptr) << name << ": " << (f ? f->name + " " + f->error : "");
  }
}

TEST(Commands, StarAndFinslerAndSw) {
  StarRequest q;
  q.product = "moyal";
  q.lhs = "u1";
  q.rhs = "u2";
  q.theta_csv = "0.3";
  RunResult r = star_report(q);
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.report.contains("summary"));
  q.theta_csv = "";
  EXPECT_THROW(star_report(q), ConfigError);

  RunResult f = finsler_report("sqrt(y1^2+y2^2)", 2, 5, 1);
  EXPECT_EQ(f.status, 0) << f.message;
  EXPECT_THROW(finsler_report("sqrt(y1^2+", 2, 5, 1), ParseError);

  std::ifstream in(cfg_path("sw_su2.json"));
  std::stringstream ss;
  ss << in.rdbuf();
  RunResult s = sw_report(ss.str());
  EXPECT_EQ(s.status, 0) << s.message;
}
