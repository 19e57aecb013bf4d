#include <string>

#include <gtest/gtest.h>

#include "dgeom/dgeom.h"

namespace {
std::string cfg_path(const char* name) { return std::string(DGEOM_CONFIG_DIR) + "/" + name; }
}  // namespace

TEST(CApi, VersionAndErrors) {
  EXPECT_STREQ(dgeom_version(), "1.0.0");
  dgeom_config* c = nullptr;
  EXPECT_EQ(dgeom_config_parse("{", &c), DGEOM_PARSE_ERROR);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(dgeom_last_error()), "");
  EXPECT_EQ(dgeom_config_parse(R"({"geometry": {"builtin": "torus"}})", &c), DGEOM_CONFIG_ERROR);
  EXPECT_EQ(dgeom_config_load(cfg_path("missing.json").c_str(), &c), DGEOM_CONFIG_ERROR);
}

TEST(CApi, AnalyzeRoundTrip) {
  dgeom_config* c = nullptr;
  ASSERT_EQ(dgeom_config_load(cfg_path("flat.json").c_str(), &c), DGEOM_OK);
  ASSERT_EQ(dgeom_config_set_points(c, 3), DGEOM_OK);
  ASSERT_EQ(dgeom_config_set_seed(c, 4), DGEOM_OK);
  dgeom_report* r = nullptr;
  ASSERT_EQ(dgeom_analyze(c, &r), DGEOM_OK);
  std::string json = dgeom_report_json(r);
  EXPECT_EQ(json.rfind("{", 0), 0u);
  EXPECT_NE(json.find("\"summary\""), std::string::npos);
  EXPECT_EQ(dgeom_report_status(r), DGEOM_OK);
  EXPECT_NE(std::string(dgeom_report_text(r)).find("PASS"), std::string::npos);
  dgeom_report_free(r);
  dgeom_config_free(c);
}

TEST(CApi, VerifyAndStar) {
  dgeom_report* r = nullptr;
  ASSERT_EQ(dgeom_verify("ncalg", &r), DGEOM_OK);
  EXPECT_EQ(std::string(dgeom_report_text(r)).find("FAIL"), std::string::npos);
  dgeom_report_free(r);
  EXPECT_EQ(dgeom_verify("nope", &r), DGEOM_CONFIG_ERROR);

  dgeom_star_request q{};
  q.product = "qplane";
  q.lhs = "v";
  q.rhs = "u";
  q.q = "0.5";
  ASSERT_EQ(dgeom_star(&q, &r), DGEOM_OK);
  EXPECT_NE(std::string(dgeom_report_json(r)).find("\"product\""), std::string::npos);
  dgeom_report_free(r);
}

TEST(CApi, FinslerParseError) {
  dgeom_report* r = nullptr;
  EXPECT_EQ(dgeom_finsler("sqrt(y1^2+", 2, 3, 1, &r), DGEOM_PARSE_ERROR);
  EXPECT_EQ(dgeom_finsler("sqrt(y1^2+y2^2)", 2, 3, 1, &r), DGEOM_OK);
  dgeom_report_free(r);
}
