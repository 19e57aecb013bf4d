// dgeom command-line front end; talks to the engine through the C API only.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dgeom/dgeom.h"

namespace {

struct Report {
  dgeom_report* r = nullptr;
  ~Report() { dgeom_report_free(r); }
};

bool write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

// Writes the report (when there is one) and maps the status to the exit code.
int finish(dgeom_status s, const Report& rep, const std::string& out, bool text_to_stdout = false) {
  if (rep.r) {
    if (text_to_stdout) std::fputs(dgeom_report_text(rep.r), stdout);
    if ((!text_to_stdout || !out.empty()) && !write_output(out, dgeom_report_json(rep.r))) {
      std::fprintf(stderr, "dgeom: cannot write '%s'\n", out.c_str());
      return 2;
    }
  }
  if (s != DGEOM_OK) std::fprintf(stderr, "dgeom: %s\n", dgeom_last_error());
  return static_cast<int>(s);
}

std::string slurp(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgeom: anholonomic-frame geometry, star products and gauge expansions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dgeom_version()));

  std::string config, out, suite;
  int points = -1;
  long long seed = -1;

  auto* analyze = app.add_subcommand("analyze", "sweep a configured geometry over sample points");
  analyze->add_option("--config", config, "JSON config path")->required();
  analyze->add_option("--points", points, "override the sample count")->check(CLI::PositiveNumber);
  analyze->add_option("--seed", seed, "override the sample seed")->check(CLI::NonNegativeNumber);
  analyze->add_option("--out", out, "report path (default stdout)");

  std::string fexpr;
  int fdim = 2, fpoints = 10;
  long long fseed = 1;
  auto* finsler = app.add_subcommand("finsler", "metric and Cartan data of a Finsler function");
  finsler->add_option("--f", fexpr, "F(x, y) as a field expression")->required();
  finsler->add_option("--n", fdim, "base dimension")->required()->check(CLI::Range(1, 3));
  finsler->add_option("--points", fpoints, "sample count")->check(CLI::PositiveNumber);
  finsler->add_option("--seed", fseed, "sample seed")->check(CLI::NonNegativeNumber);
  finsler->add_option("--out", out, "report path (default stdout)");

  std::string product, lhs, rhs, theta, structure, q, ordering = "normal";
  int lie_order = 2;
  auto* star = app.add_subcommand("star", "star product of two polynomials");
  star->add_option("--product", product, "moyal | lie | qplane")
      ->required()
      ->check(CLI::IsMember({"moyal", "lie", "qplane"}));
  star->add_option("--lhs", lhs, "left polynomial")->required();
  star->add_option("--rhs", rhs, "right polynomial")->required();
  star->add_option("--theta", theta, "theta entries, csv");
  star->add_option("--structure", structure, "structure-constant JSON file");
  star->add_option("--q", q, "quantum-plane parameter");
  star->add_option("--ordering", ordering, "normal | symmetric (quantum plane)");
  star->add_option("--order", lie_order, "truncation order of the Lie product")->check(CLI::Range(1, 2));
  star->add_option("--out", out, "report path (default stdout)");

  auto* sw = app.add_subcommand("sw", "first-order Seiberg-Witten expansion and its checks");
  sw->add_option("--config", config, "JSON config path")->required();
  sw->add_option("--out", out, "report path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", suite, "all | bundle | connection | curvature | finsler | spectral | ncalg | gauge")
      ->required();
  verify->add_option("--out", out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Report rep;
  if (*analyze) {
    dgeom_config* cfg = nullptr;
    dgeom_status s = dgeom_config_load(config.c_str(), &cfg);
    if (s == DGEOM_OK && points > 0) s = dgeom_config_set_points(cfg, points);
    if (s == DGEOM_OK && seed >= 0) s = dgeom_config_set_seed(cfg, static_cast<uint64_t>(seed));
    if (s == DGEOM_OK) s = dgeom_analyze(cfg, &rep.r);
    dgeom_config_free(cfg);
    return finish(s, rep, out);
  }
  if (*finsler) return finish(dgeom_finsler(fexpr.c_str(), fdim, fpoints, static_cast<uint64_t>(fseed), &rep.r), rep, out);
  if (*star) {
    std::string sjson;
    if (!structure.empty()) {
      bool ok = false;
      sjson = slurp(structure, ok);
      if (!ok) {
        std::fprintf(stderr, "dgeom: cannot read '%s'\n", structure.c_str());
        return 2;
      }
    }
    dgeom_star_request req{product.c_str(),
                           lhs.c_str(),
                           rhs.c_str(),
                           theta.empty() ? nullptr : theta.c_str(),
                           sjson.empty() ? nullptr : sjson.c_str(),
                           q.empty() ? nullptr : q.c_str(),
                           ordering.c_str(),
                           lie_order};
    return finish(dgeom_star(&req, &rep.r), rep, out);
  }
  if (*sw) return finish(dgeom_sw_load(config.c_str(), &rep.r), rep, out);
  if (*verify) return finish(dgeom_verify(suite.c_str(), &rep.r), rep, out, true);
  return 2;
}
