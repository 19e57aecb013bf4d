#include "dgeom/dgeom.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dgeom/app.hpp"
#include "dgeom/errors.hpp"

struct dgeom_config {
  dgeom::RunConfig cfg;
};

struct dgeom_report {
  std::string json;
  std::string text;
  std::string message;
  dgeom_status status = DGEOM_OK;
};

namespace {

thread_local std::string last_error;

dgeom_status fail(dgeom_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
dgeom_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const dgeom::ConfigError& e) {
    return fail(DGEOM_CONFIG_ERROR, std::string("config error: ") + e.what());
  } catch (const dgeom::OrderError& e) {
    return fail(DGEOM_CONFIG_ERROR, std::string("config error: ") + e.what());
  } catch (const dgeom::ParseError& e) {
    return fail(DGEOM_PARSE_ERROR, std::string("parse error: ") + e.what());
  } catch (const dgeom::NumericError& e) {
    return fail(DGEOM_NUMERIC_ERROR, std::string("numeric error: ") + e.what());
  } catch (const std::exception& e) {
    return fail(DGEOM_INTERNAL_ERROR, std::string("internal error: ") + e.what());
  } catch (...) {
    return fail(DGEOM_INTERNAL_ERROR, "internal error");
  }
}

std::string number(const dgeom::ordered_json& v) {
  if (!v.is_number()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v.get<double>());
  return buf;
}

std::string render(const dgeom::ordered_json& rep) {
  std::ostringstream out;
  const auto& s = rep["summary"];
  if (s.contains("checks")) {
    for (const auto& c : s["checks"])
      out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["suite"].get<std::string>() << "/"
          << c["name"].get<std::string>() << "  " << number(c["value"])
          << (c["relation"] == "above" ? " > " : " <= ") << number(c["tol"])
          << (c.contains("error") ? "  (" + c["error"].get<std::string>() + ")" : "") << "\n";
  }
  if (s.contains("invariants")) {
    for (const auto& c : s["invariants"])
      out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << "  "
          << number(c["max"]) << (c.contains("relation") ? " > " : " <= ") << number(c["tol"]) << "\n";
  }
  if (s.contains("degenerate")) out << "degenerate points: " << s["degenerate"].get<int>() << "\n";
  if (s.contains("product") && s["product"].contains("text"))
    out << "product: " << s["product"]["text"].get<std::string>() << "\n"
        << "commutator: " << s["commutator"]["text"].get<std::string>() << "\n";
  return out.str();
}

dgeom_status emit(dgeom::RunResult r, dgeom_report** out) {
  auto* rep = new dgeom_report;
  rep->json = dgeom::dump_report(r.report);
  rep->text = render(r.report);
  rep->message = r.message;
  rep->status = static_cast<dgeom_status>(r.status);
  *out = rep;
  if (r.status != 0) last_error = r.message;
  return rep->status;
}

bool null_out(void* p) { return p == nullptr; }

}  // namespace

extern "C" {

const char* dgeom_version(void) { return dgeom::kVersion; }

const char* dgeom_last_error(void) { return last_error.c_str(); }

dgeom_status dgeom_config_load(const char* path, dgeom_config** out) {
  if (!path || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new dgeom_config{dgeom::load_config(path)};
    return DGEOM_OK;
  });
}

dgeom_status dgeom_config_parse(const char* json_text, dgeom_config** out) {
  if (!json_text || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new dgeom_config{dgeom::parse_config(json_text)};
    return DGEOM_OK;
  });
}

dgeom_status dgeom_config_set_points(dgeom_config* cfg, int count) {
  if (!cfg) return fail(DGEOM_CONFIG_ERROR, "null config");
  return guarded([&] {
    dgeom::set_points(cfg->cfg, count);
    return DGEOM_OK;
  });
}

dgeom_status dgeom_config_set_seed(dgeom_config* cfg, uint64_t seed) {
  if (!cfg) return fail(DGEOM_CONFIG_ERROR, "null config");
  return guarded([&] {
    dgeom::set_seed(cfg->cfg, seed);
    return DGEOM_OK;
  });
}

void dgeom_config_free(dgeom_config* cfg) { delete cfg; }

dgeom_status dgeom_analyze(const dgeom_config* cfg, dgeom_report** out) {
  if (!cfg || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { return emit(dgeom::run_report(cfg->cfg), out); });
}

dgeom_status dgeom_finsler(const char* f, int n, int points, uint64_t seed, dgeom_report** out) {
  if (!f || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { return emit(dgeom::finsler_report(f, n, points, seed), out); });
}

dgeom_status dgeom_star(const dgeom_star_request* req, dgeom_report** out) {
  if (!req || !req->product || !req->lhs || !req->rhs || null_out(out))
    return fail(DGEOM_CONFIG_ERROR, "star needs product, lhs and rhs");
  *out = nullptr;
  return guarded([&] {
    dgeom::StarRequest r;
    r.product = req->product;
    r.lhs = req->lhs;
    r.rhs = req->rhs;
    if (req->theta) r.theta_csv = req->theta;
    if (req->structure_json) r.structure_json = req->structure_json;
    if (req->q) r.q = req->q;
    if (req->ordering) r.ordering = req->ordering;
    if (req->lie_order) r.lie_order = req->lie_order;
    return emit(dgeom::star_report(r), out);
  });
}

dgeom_status dgeom_sw(const char* config_json, dgeom_report** out) {
  if (!config_json || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { return emit(dgeom::sw_report(config_json), out); });
}

dgeom_status dgeom_sw_load(const char* path, dgeom_report** out) {
  if (!path || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dgeom::ConfigError(std::string("cannot read '") + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return emit(dgeom::sw_report(s.str()), out);
  });
}

dgeom_status dgeom_verify(const char* suite, dgeom_report** out) {
  if (!suite || null_out(out)) return fail(DGEOM_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] { return emit(dgeom::verify_report(suite), out); });
}

const char* dgeom_report_json(const dgeom_report* r) { return r ? r->json.c_str() : ""; }
const char* dgeom_report_text(const dgeom_report* r) { return r ? r->text.c_str() : ""; }
dgeom_status dgeom_report_status(const dgeom_report* r) { return r ? r->status : DGEOM_INTERNAL_ERROR; }
const char* dgeom_report_message(const dgeom_report* r) { return r ? r->message.c_str() : ""; }
void dgeom_report_free(dgeom_report* r) { delete r; }

}  // extern "C"
