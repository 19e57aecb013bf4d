#include "dgeom/app.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "dgeom/errors.hpp"
#include "dgeom/gauge_sw.hpp"
#include "dgeom/jet_linalg.hpp"
#include "dgeom/ncalg.hpp"
#include "dgeom/spectral.hpp"

namespace dgeom {

using nlohmann::json;

namespace {

// ---- json helpers ------------------------------------------------------------------

ordered_json parse_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_keys(const ordered_json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double get_number(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
  return v;
}

int get_int(const ordered_json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
  return j.get<int>();
}

std::string get_string(const ordered_json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> string_list(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_string(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<std::string>> string_rows(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of rows");
  std::vector<std::vector<std::string>> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(string_list(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

// Re-throws a parse error with the config location prefixed.
template <class F>
auto located(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    std::string msg = e.what();
    const std::string tail = " at position " + std::to_string(e.position());
    if (msg.size() >= tail.size() && msg.compare(msg.size() - tail.size(), tail.size(), tail) == 0)
      msg.resize(msg.size() - tail.size());
    throw ParseError(where + ": " + msg, e.position());
  }
}

ordered_json tensor_json(const RealTensor& t) {
  ordered_json j;
  j["shape"] = ordered_json::array();
  for (int k = 0; k < t.rank(); ++k) j["shape"].push_back(t.dim(k));
  j["data"] = t.data();
  return j;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json j = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

ordered_json report(ordered_json config, ordered_json points, ordered_json summary) {
  ordered_json r;
  r["config"] = std::move(config);
  r["points"] = std::move(points);
  r["summary"] = std::move(summary);
  r["version"] = {{"tool", kVersion}, {"schema", kReportSchema}};
  return r;
}

// Invariant bookkeeping for report summaries.
struct Invariant {
  std::string name;
  std::string key;  // dotted path inside a point object
  double tol;
  bool lower_bound = false;
};

const ordered_json* lookup(const ordered_json& p, const std::string& key) {
  const ordered_json* cur = &p;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &(*cur)[part];
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

// Every invariant is reported by its largest value over the points; lower
// bounds ask that some point exceed the bound.
ordered_json summarize(const ordered_json& points, const std::vector<Invariant>& inv, bool& all_pass) {
  ordered_json out = ordered_json::array();
  all_pass = true;
  for (const auto& I : inv) {
    double worst = 0.0;
    bool seen = false, finite = true;
    for (const auto& p : points) {
      const ordered_json* v = lookup(p, I.key);
      if (!v) continue;
      seen = true;
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        finite = false;
        continue;
      }
      worst = std::max(worst, v->get<double>());
    }
    if (!seen) continue;
    const bool pass = finite && (I.lower_bound ? worst > I.tol : worst <= I.tol);
    all_pass = all_pass && pass;
    ordered_json e = {{"name", I.name}, {"max", worst}, {"tol", I.tol}};
    if (I.lower_bound) e["relation"] = "above";
    e["pass"] = pass;
    out.push_back(std::move(e));
  }
  return out;
}

// ---- config ------------------------------------------------------------------------

std::shared_ptr<const UserConnection> parse_user_connection(const ordered_json& j, BundleShape s) {
  check_keys(j, "connection.user", {"L_hh", "L_vv_h", "C_hh_v", "C_vv_v"});
  auto U = std::make_shared<UserConnection>();
  U->shape = s;
  const int n = s.n, m = s.m;
  auto family = [&](const char* key, int count, std::vector<ScalarField>& out) {
    if (!j.contains(key)) {
      out.assign(count, ScalarField::constant(0.0, s));
      return;
    }
    auto list = string_list(j[key], std::string("connection.user.") + key);
    if (static_cast<int>(list.size()) != count)
      throw ConfigError(std::string("connection.user.") + key + " needs " + std::to_string(count) + " entries");
    for (std::size_t k = 0; k < list.size(); ++k)
      out.push_back(located(std::string("connection.user.") + key + "[" + std::to_string(k) + "]",
                            [&] { return parse_field(list[k], s); }));
  };
  family("L_hh", n * n * n, U->L_hh);
  family("L_vv_h", m * m * n, U->L_vv_h);
  family("C_hh_v", n * n * m, U->C_hh_v);
  family("C_vv_v", m * m * m, U->C_vv_v);
  return U;
}

std::vector<std::vector<ScalarField>> field_block(const ordered_json& j, const std::string& where, int rows,
                                                  int cols, BundleShape s) {
  auto r = string_rows(j, where);
  if (static_cast<int>(r.size()) != rows) throw ConfigError(where + " needs " + std::to_string(rows) + " rows");
  std::vector<std::vector<ScalarField>> out(rows);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(r[i].size()) != cols)
      throw ConfigError(where + " rows need " + std::to_string(cols) + " entries");
    for (int k = 0; k < cols; ++k)
      out[i].push_back(located(where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                               [&] { return parse_field(r[i][k], s); }));
  }
  return out;
}

RealTensor eval_block(const std::vector<std::vector<ScalarField>>& b, std::span<const double> u) {
  if (b.empty()) return {};
  const int r = static_cast<int>(b.size()), c = static_cast<int>(b[0].size());
  RealTensor t({r, c}, 0.0);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) t(i, k) = b[i][k].eval(u);
  return t;
}

void apply_samples(RunConfig& cfg) {
  validate(cfg.samples);
  auto& e = cfg.echo["samples"];
  e = ordered_json::object();
  e["count"] = cfg.samples.count;
  e["seed"] = cfg.samples.seed;
  e["x_box"] = {cfg.samples.x_min, cfg.samples.x_max};
  e["y_radius"] = {cfg.samples.y_min, cfg.samples.y_max};
}

// ---- per-point work ----------------------------------------------------------------

struct PointJob {
  const RunConfig* cfg;
  const std::vector<ScalarField>* test_fields;
};

ordered_json analyze_point(const PointJob& job, int index, const std::vector<double>& u) {
  const RunConfig& cfg = *job.cfg;
  const GeometrySource& src = *cfg.geometry;
  const BundleShape sh = src.shape();
  const int n = sh.n, m = sh.m, d = sh.dim();
  const ComputeToggles& c = cfg.compute;
  ordered_json p;
  p["index"] = index;
  p["u"] = u;
  p["status"] = "ok";

  GeometryJets G0 = src.jets(u, 0);
  const double cg = condition_number(value_matrix(G0.g)), ch = condition_number(value_matrix(G0.h));
  if (!(cg <= kConditionLimit) || !(ch <= kConditionLimit))
    throw DegenerateError("metric block condition number above 1e8");
  p["condition"] = {{"g", cg}, {"h", ch}};

  const bool need_curv = c.curvature || c.ricci || c.einstein;
  GeometryJets G = src.jets(u, 2);
  JetTensor GamJ = connection_jets(G, cfg.connection);
  JetTensor WJ = anholonomy_jets(G);
  RealTensor Gam = values(GamJ), W = values(WJ);

  if (c.metricity) p["metricity"] = metric_compatibility_residual(Gam, G);
  if (cfg.full_tensors) p["connection"] = tensor_json(Gam);

  if (c.anholonomy) {
    RealTensor Om = n_curvature_values(G);
    double comm = 0.0, cross = 0.0;
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cross = std::max(cross, std::abs(W(n + a, i, j) - Om(a, i, j)));
    for (const auto& f : *job.test_fields) {
      Jet F = f.eval_jet(u, 2);
      std::vector<Jet> df;
      for (int a = 0; a < d; ++a) df.push_back(elongated(G, F, a));
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          double s = elongated(G, df[b], a).value() - elongated(G, df[a], b).value();
          for (int k = 0; k < d; ++k) s -= W(k, a, b) * df[k].value();
          comm = std::max(comm, std::abs(s));
        }
    }
    p["anholonomy"] = {{"commutator", comm}, {"omega_cross_check", cross}, {"omega", max_abs(Om)}};
  }

  if (c.torsion) {
    TorsionPoint T = torsion_from(Gam, W, sh);
    p["torsion"] = {{"T_hh", max_abs(T.T_hh)},   {"C_hv", max_abs(T.C_hv)},   {"S_vv", max_abs(T.S_vv)},
                    {"T_vhh", max_abs(T.T_vhh)}, {"T_vvh", max_abs(T.T_vvh)},
                    {"reassembly", max_abs_diff(assemble_torsion(T), T.T)}};
    if (cfg.full_tensors) p["torsion"]["tensor"] = tensor_json(T.T);
  }

  if (need_curv) {
    CurvaturePoint C = curvature_point(values(curvature_jets(G, GamJ, WJ)), sh);
    if (c.curvature) {
      CurvaturePoint D = curvature_families_direct(G, cfg.connection);
      double diff = 0.0;
      for (auto [x, y] : {std::pair{&C.R_h, &D.R_h}, {&C.R_v, &D.R_v}, {&C.P_h, &D.P_h},
                          {&C.P_v, &D.P_v}, {&C.S_h, &D.S_h}, {&C.S_v, &D.S_v}})
        diff = std::max(diff, max_abs_diff(*x, *y));
      const double scale = std::max(1.0, max_abs(C.R));
      p["curvature"] = {{"R_h", max_abs(C.R_h)}, {"R_v", max_abs(C.R_v)}, {"P_h", max_abs(C.P_h)},
                        {"P_v", max_abs(C.P_v)}, {"S_h", max_abs(C.S_h)}, {"S_v", max_abs(C.S_v)},
                        {"families_direct", diff / scale}};
      if (cfg.full_tensors) p["curvature"]["tensor"] = tensor_json(C.R);
    }
    RicciPoint R = ricci_scalar(C, G);
    if (c.ricci) {
      double asym = 0.0;
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) asym = std::max(asym, std::abs(R.P1(a, i) - R.P2(i, a)));
      p["ricci"] = {{"Rhat", R.Rhat}, {"S", R.S}, {"total", R.total}, {"mixed_asymmetry", asym}};
    }
    if (c.einstein) {
      EinsteinSources s{eval_block(cfg.einstein.ij, u), eval_block(cfg.einstein.ab, u),
                        eval_block(cfg.einstein.ai, u), eval_block(cfg.einstein.ia, u)};
      EinsteinReport E = einstein_residual(R, G, cfg.einstein.kappa, s);
      p["einstein"] = {{"Rhat", R.Rhat}, {"S", R.S},           {"hh", max_abs(E.hh)}, {"vv", max_abs(E.vv)},
                       {"vh", max_abs(E.vh)}, {"hv", max_abs(E.hv)}, {"max", E.max_abs}};
    }
  }

  if (c.spectral) {
    SpectralDensities D = seeley_densities(src, cfg.connection, cfg.spectral.Lambda, u);
    p["spectral"] = {{"a0", D.a0}, {"a2", D.a2}, {"a4", D.a4}, {"R", D.R}, {"Rhat", D.Rhat},
                     {"sqrt_G", D.sqrt_G}, {"trace_I", D.trace_I}};
  }

  if (c.finsler && cfg.finsler) {
    const FinslerFunction& F = *cfg.finsler;
    FinslerMetricPoint g = finsler_metric(F, u);
    p["finsler"] = {{"F", F.value(u)},
                    {"homogeneity", homogeneity_residual(F, u)},
                    {"kahler_closure", kahler_form_closure(F, u)},
                    {"min_eigenvalue", g.min_eigenvalue}};
  }

  if (c.gauge) {
    GaugeStrength s = gauge_strength(src, cfg.connection, u);
    BridgeReport b = gauge_geometry_bridge(src, cfg.connection, cfg.gauge.l0, u);
    p["gauge"] = {{"lagrangian_density", lagrangian_density(s, {cfg.gauge.l0, cfg.gauge.lambda})},
                  {"bridge_curvature", b.curvature_residual},
                  {"bridge_torsion", b.torsion_residual},
                  {"bridge_projection", b.projection_residual}};
  }
  return p;
}

std::vector<Invariant> analyze_invariants(const RunConfig& cfg) {
  std::vector<Invariant> v;
  if (cfg.connection.kind != ConnectionKind::User) v.push_back({"metricity", "metricity", 1e-9});
  v.push_back({"anholonomy commutator", "anholonomy.commutator", 1e-8});
  v.push_back({"torsion/omega cross-check", "anholonomy.omega_cross_check", 1e-10});
  v.push_back({"torsion reassembly", "torsion.reassembly", 1e-12});
  v.push_back({"curvature families", "curvature.families_direct", 1e-10});
  v.push_back({"finsler homogeneity", "finsler.homogeneity", 1e-9});
  v.push_back({"kahler closure", "finsler.kahler_closure", 1e-7});
  v.push_back({"gauge/geometry bridge", "gauge.bridge_curvature", 1e-8});
  v.push_back({"gauge/geometry torsion", "gauge.bridge_torsion", 1e-8});
  return v;
}

// Largest value of every numeric diagnostic across points, keyed by path.
void collect_maxima(const ordered_json& p, const std::string& prefix, ordered_json& out) {
  for (const auto& [k, v] : p.items()) {
    if (k == "index" || k == "u" || k == "status" || k == "diagnostic" || k == "tensor") continue;
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      collect_maxima(v, key, out);
    } else if (v.is_number()) {
      const double x = std::abs(v.get<double>());
      if (!out.contains(key) || out[key].get<double>() < x) out[key] = x;
    }
  }
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

// ---- public --------------------------------------------------------------------------

bool all_finite(const ordered_json& j) {
  if (j.is_number_float()) return std::isfinite(j.get<double>());
  if (j.is_structured())
    for (const auto& v : j)
      if (!all_finite(v)) return false;
  return true;
}

std::string dump_report(const ordered_json& j) { return j.dump(2) + "\n"; }

RunConfig parse_config(const std::string& text) {
  ordered_json j = parse_json(text);
  check_keys(j, "config",
             {"shape", "geometry", "connection", "samples", "compute", "einstein", "spectral", "gauge",
              "threads", "max_degenerate_fraction", "full_tensors"});
  RunConfig cfg;
  cfg.echo = j;

  if (!j.contains("geometry")) throw ConfigError("config needs a 'geometry' entry");
  const ordered_json& g = j["geometry"];
  check_keys(g, "geometry", {"builtin", "g", "h", "N", "finsler", "finsler_expr", "n"});
  std::optional<BundleShape> shape;
  if (j.contains("shape")) {
    check_keys(j["shape"], "shape", {"n", "m"});
    if (!j["shape"].contains("n") || !j["shape"].contains("m")) throw ConfigError("shape needs n and m");
    shape = BundleShape{get_int(j["shape"]["n"], "shape.n"), get_int(j["shape"]["m"], "shape.m")};
    validate(*shape);
  }
  const int kinds = g.contains("builtin") + g.contains("g") + g.contains("finsler") + g.contains("finsler_expr");
  if (kinds != 1) throw ConfigError("geometry needs exactly one of builtin, g/h/N, finsler, finsler_expr");
  if (g.contains("builtin")) {
    cfg.geometry = builtin_geometry(get_string(g["builtin"], "geometry.builtin"));
    if (auto* f = dynamic_cast<const FinslerGeometry*>(cfg.geometry.get())) cfg.finsler = f->function();
  } else if (g.contains("finsler") || g.contains("finsler_expr")) {
    int n = shape ? shape->n : 2;
    if (g.contains("n")) n = get_int(g["n"], "geometry.n");
    if (shape && !(shape->n == n && shape->m == n)) throw ConfigError("finsler geometry needs shape n = m");
    FinslerFunction F =
        g.contains("finsler")
            ? FinslerFunction::builtin(get_string(g["finsler"], "geometry.finsler"), n)
            : located("geometry.finsler_expr",
                      [&] { return FinslerFunction::from_expr(get_string(g["finsler_expr"], "geometry.finsler_expr"), n); });
    cfg.finsler = F;
    cfg.geometry = std::make_shared<FinslerGeometry>(F);
  } else {
    if (!shape) throw ConfigError("field geometry needs a shape");
    if (!g.contains("h")) throw ConfigError("geometry needs both g and h");
    auto gr = string_rows(g["g"], "geometry.g"), hr = string_rows(g["h"], "geometry.h");
    std::vector<std::vector<std::string>> Nr;
    if (g.contains("N")) Nr = string_rows(g["N"], "geometry.N");
    // Locate parse errors per entry before handing the rows over.
    auto scan = [&](const std::vector<std::vector<std::string>>& rows, const std::string& where) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k)
          located(where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                  [&] { return parse_field(rows[i][k], *shape); });
    };
    scan(gr, "geometry.g");
    scan(hr, "geometry.h");
    scan(Nr, "geometry.N");
    cfg.geometry = field_geometry(gr, hr, Nr, *shape);
  }
  if (shape && !(*shape == cfg.geometry->shape())) throw ConfigError("shape disagrees with the geometry");
  cfg.shape = cfg.geometry->shape();
  cfg.echo["shape"] = {{"n", cfg.shape.n}, {"m", cfg.shape.m}};

  if (j.contains("connection")) {
    const ordered_json& c = j["connection"];
    if (c.is_string()) {
      const std::string k = c.get<std::string>();
      if (k == "canonical") cfg.connection = ConnectionSelector::canonical();
      else if (k == "levi-civita") cfg.connection = ConnectionSelector::levi_civita();
      else throw ConfigError("connection must be canonical, levi-civita or {\"user\": ...}");
    } else {
      check_keys(c, "connection", {"user"});
      if (!c.contains("user")) throw ConfigError("connection object needs 'user'");
      cfg.connection = ConnectionSelector::from_user(parse_user_connection(c["user"], cfg.shape));
    }
  }
  cfg.echo["connection"] = cfg.connection.kind == ConnectionKind::User && j.contains("connection")
                               ? j["connection"]
                               : ordered_json(to_string(cfg.connection.kind));

  if (j.contains("samples")) {
    const ordered_json& s = j["samples"];
    check_keys(s, "samples", {"count", "seed", "x_box", "y_radius"});
    if (s.contains("count")) cfg.samples.count = get_int(s["count"], "samples.count");
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ConfigError("samples.seed must be a non-negative integer");
      cfg.samples.seed = s["seed"].get<std::uint64_t>();
    }
    auto range = [&](const char* key, double& lo, double& hi) {
      if (!s.contains(key)) return;
      if (!s[key].is_array() || s[key].size() != 2) throw ConfigError(std::string("samples.") + key + " needs [lo, hi]");
      lo = get_number(s[key][0], std::string("samples.") + key);
      hi = get_number(s[key][1], std::string("samples.") + key);
    };
    range("x_box", cfg.samples.x_min, cfg.samples.x_max);
    range("y_radius", cfg.samples.y_min, cfg.samples.y_max);
  }
  apply_samples(cfg);

  if (j.contains("compute")) {
    ComputeToggles t{false, false, false, false, false, false, false, false, false};
    for (const auto& name : string_list(j["compute"], "compute")) {
      if (name == "metricity") t.metricity = true;
      else if (name == "anholonomy") t.anholonomy = true;
      else if (name == "torsion") t.torsion = true;
      else if (name == "curvature") t.curvature = true;
      else if (name == "ricci") t.ricci = true;
      else if (name == "einstein") t.einstein = true;
      else if (name == "spectral") t.spectral = true;
      else if (name == "finsler") t.finsler = true;
      else if (name == "gauge") t.gauge = true;
      else throw ConfigError("unknown compute entry '" + name + "'");
    }
    cfg.compute = t;
  } else {
    cfg.compute.finsler = cfg.finsler.has_value();
  }
  if (cfg.compute.finsler && !cfg.finsler) throw ConfigError("compute 'finsler' needs a Finsler geometry");
  if (cfg.compute.gauge && cfg.shape.dim() != 4) throw ConfigError("compute 'gauge' needs n + m = 4");

  if (j.contains("einstein")) {
    const ordered_json& e = j["einstein"];
    check_keys(e, "einstein", {"kappa", "sources"});
    if (e.contains("kappa")) cfg.einstein.kappa = get_number(e["kappa"], "einstein.kappa");
    if (e.contains("sources")) {
      const ordered_json& s = e["sources"];
      check_keys(s, "einstein.sources", {"ij", "ab", "ai", "ia"});
      const int n = cfg.shape.n, m = cfg.shape.m;
      if (s.contains("ij")) cfg.einstein.ij = field_block(s["ij"], "einstein.sources.ij", n, n, cfg.shape);
      if (s.contains("ab")) cfg.einstein.ab = field_block(s["ab"], "einstein.sources.ab", m, m, cfg.shape);
      if (s.contains("ai")) cfg.einstein.ai = field_block(s["ai"], "einstein.sources.ai", m, n, cfg.shape);
      if (s.contains("ia")) cfg.einstein.ia = field_block(s["ia"], "einstein.sources.ia", n, m, cfg.shape);
    }
  }
  if (j.contains("spectral")) {
    const ordered_json& s = j["spectral"];
    check_keys(s, "spectral", {"Lambda", "alpha", "beta"});
    if (s.contains("Lambda")) cfg.spectral.Lambda = get_number(s["Lambda"], "spectral.Lambda");
    if (s.contains("alpha")) cfg.spectral.alpha = get_number(s["alpha"], "spectral.alpha");
    if (s.contains("beta")) cfg.spectral.beta = get_number(s["beta"], "spectral.beta");
    if (!(cfg.spectral.Lambda > 0.0) || !(cfg.spectral.beta > 0.0))
      throw ConfigError("spectral Lambda and beta must be positive");
  }
  if (j.contains("gauge")) {
    const ordered_json& s = j["gauge"];
    check_keys(s, "gauge", {"l0", "lambda"});
    if (s.contains("l0")) cfg.gauge.l0 = get_number(s["l0"], "gauge.l0");
    if (s.contains("lambda")) cfg.gauge.lambda = get_number(s["lambda"], "gauge.lambda");
    if (!(cfg.gauge.l0 > 0.0) || cfg.gauge.lambda == 0.0) throw ConfigError("gauge l0 must be positive and lambda nonzero");
  }
  if (j.contains("threads")) {
    cfg.threads = get_int(j["threads"], "threads");
    if (cfg.threads < 1 || cfg.threads > 256) throw ConfigError("threads must be in 1..256");
  }
  if (j.contains("max_degenerate_fraction")) {
    cfg.max_degenerate_fraction = get_number(j["max_degenerate_fraction"], "max_degenerate_fraction");
    if (cfg.max_degenerate_fraction < 0.0 || cfg.max_degenerate_fraction > 1.0)
      throw ConfigError("max_degenerate_fraction must lie in [0, 1]");
  }
  if (j.contains("full_tensors")) {
    if (!j["full_tensors"].is_boolean()) throw ConfigError("full_tensors must be true or false");
    cfg.full_tensors = j["full_tensors"].get<bool>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

void set_points(RunConfig& cfg, int count) {
  cfg.samples.count = count;
  apply_samples(cfg);
}

void set_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.samples.seed = seed;
  apply_samples(cfg);
}

RunResult run_report(const RunConfig& cfg) {
  const auto pts = sample_points(cfg.shape, cfg.samples);
  const auto fields = random_test_fields(cfg.shape, 10, cfg.samples.seed + 1);
  const PointJob job{&cfg, &fields};
  const int count = static_cast<int>(pts.size());
  std::vector<ordered_json> out(count);
  std::vector<std::exception_ptr> fatal(count);

  parallel_for(count, cfg.threads, [&](int i) {
    try {
      out[i] = analyze_point(job, i, pts[i]);
    } catch (const NumericError& e) {
      out[i] = {{"index", i}, {"u", pts[i]}, {"status", "degenerate"}, {"diagnostic", e.what()}};
    } catch (...) {
      fatal[i] = std::current_exception();
    }
  });
  for (auto& f : fatal)
    if (f) std::rethrow_exception(f);

  ordered_json points = ordered_json::array();
  int degenerate = 0;
  for (auto& p : out) {
    degenerate += p["status"] == "degenerate";
    points.push_back(std::move(p));
  }

  ordered_json summary;
  summary["points"] = count;
  summary["ok"] = count - degenerate;
  summary["degenerate"] = degenerate;
  const double frac = static_cast<double>(degenerate) / count;
  summary["degenerate_fraction"] = frac;
  bool pass = true;
  summary["invariants"] = summarize(points, analyze_invariants(cfg), pass);
  ordered_json maxima = ordered_json::object();
  for (const auto& p : points)
    if (p["status"] == "ok") collect_maxima(p, "", maxima);
  summary["maxima"] = maxima;

  if (cfg.compute.spectral && degenerate == 0) {
    std::vector<QuadraturePoint> grid;
    for (const auto& u : pts) grid.push_back({u, 1.0 / count});
    SpectralAction A = spectral_action(*cfg.geometry, cfg.connection, cfg.spectral.Lambda, cfg.spectral.alpha,
                                       cfg.spectral.beta, grid);
    summary["spectral_action"] = {{"f0", A.f.f0}, {"f2", A.f.f2}, {"lambda4", A.lambda4},
                                  {"lambda2", A.lambda2}, {"value", A.value}, {"weights", "sample mean"}};
  }
  summary["pass"] = pass;

  RunResult r;
  r.report = report(cfg.echo, std::move(points), std::move(summary));
  if (frac > cfg.max_degenerate_fraction) {
    r.status = 4;
    r.message = std::to_string(degenerate) + " of " + std::to_string(count) +
                " points degenerate, above the allowed fraction";
  } else if (!all_finite(r.report)) {
    r.status = 4;
    r.message = "non-finite number in report";
  } else if (!pass) {
    r.status = 1;
    for (const auto& inv : r.report["summary"]["invariants"])
      if (!inv["pass"].get<bool>()) {
        r.message = "invariant failed: " + inv["name"].get<std::string>();
        break;
      }
  }
  return r;
}

// ---- finsler -------------------------------------------------------------------------

RunResult finsler_report(const std::string& expr, int n, int points, std::uint64_t seed) {
  const FinslerFunction F = located("f", [&] { return FinslerFunction::from_expr(expr, n); });
  const FinslerGeometry geo(F);
  SampleSpec spec;
  spec.count = points;
  spec.seed = seed;
  const auto pts = sample_points(F.shape(), spec);

  ordered_json config = {{"f", expr}, {"n", n}, {"points", points}, {"seed", seed}};
  ordered_json out = ordered_json::array();
  int degenerate = 0, indefinite = 0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const auto& u = pts[i];
    ordered_json p = {{"index", i}, {"u", u}};
    try {
      FinslerMetricPoint g = finsler_metric(F, u);
      GeometryJets G = geo.jets(u, 1);
      p["status"] = "ok";
      p["F"] = F.value(u);
      p["metric"] = matrix_json(g.g);
      p["rank"] = g.rank;
      p["min_eigenvalue"] = g.min_eigenvalue;
      p["cartan_N"] = matrix_json(cartan_nconnection(F, u));
      p["homogeneity"] = homogeneity_residual(F, u);
      p["kahler_closure"] = kahler_form_closure(F, u);
      p["metricity"] = metric_compatibility_residual(values(connection_jets(G, ConnectionSelector::canonical())), G);
      indefinite += !g.positive_definite();
    } catch (const NumericError& e) {
      p["status"] = "degenerate";
      p["diagnostic"] = e.what();
      ++degenerate;
    }
    out.push_back(std::move(p));
  }
  bool pass = true;
  ordered_json summary;
  summary["points"] = points;
  summary["degenerate"] = degenerate;
  summary["not_positive_definite"] = indefinite;
  summary["invariants"] = summarize(out, {{"homogeneity", "homogeneity", 1e-9},
                                          {"kahler closure", "kahler_closure", 1e-7},
                                          {"metricity", "metricity", 1e-9}},
                                    pass);
  summary["pass"] = pass;
  RunResult r;
  r.report = report(std::move(config), std::move(out), std::move(summary));
  if (degenerate * 10 > points || !all_finite(r.report)) {
    r.status = 4;
    r.message = "degenerate Finsler function at the sample points";
  } else if (!pass) {
    r.status = 1;
    r.message = "Finsler invariants failed";
  }
  return r;
}

// ---- star ----------------------------------------------------------------------------

LieStructure parse_structure(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "su2") return LieStructure::su2();
    if (name == "desitter") return desitter_algebra({1, 1, 1, 1, -1}, 1.0).structure;
    throw ConfigError("unknown structure '" + name + "'");
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("f"))
    throw ConfigError("structure needs {\"dim\": S, \"f\": [[a, b, c, value], ...]}");
  for (const auto& [k, v] : j.items())
    if (k != "dim" && k != "f") throw ConfigError("unknown key '" + k + "' in structure");
  if (!j["dim"].is_number_integer()) throw ConfigError("structure dim must be an integer");
  const int S = j["dim"].get<int>();
  if (S < 1 || S > 32) throw ConfigError("structure dim must be in 1..32");
  LieStructure L = LieStructure::zero(S);
  if (!j["f"].is_array()) throw ConfigError("structure f must be an array");
  for (const auto& e : j["f"]) {
    if (!e.is_array() || e.size() != 4) throw ConfigError("structure entries are [a, b, c, value]");
    int idx[3];
    for (int k = 0; k < 3; ++k) {
      if (!e[k].is_number_integer()) throw ConfigError("structure indices must be integers");
      idx[k] = e[k].get<int>();
      if (idx[k] < 0 || idx[k] >= S) throw ConfigError("structure index out of range");
    }
    if (!e[3].is_number()) throw ConfigError("structure value must be a number");
    const double v = e[3].get<double>();
    if (idx[0] == idx[1] && v != 0.0) throw ConfigError("structure constants must be antisymmetric");
    L.at(idx[0], idx[1], idx[2]) = v;
    L.at(idx[1], idx[0], idx[2]) = -v;
  }
  return L;
}

namespace {

int theta_size(const std::string& csv) {
  int k = 1;
  for (char ch : csv) k += ch == ',';
  for (int N = 2; N <= 9; ++N)
    if (N * (N - 1) / 2 == k) return N;
  for (int N = 1; N <= 9; ++N)
    if (N * N == k) return N;
  throw ConfigError("theta needs N(N-1)/2 or N*N entries");
}

ordered_json poly_json(const Poly& p) {
  ordered_json terms = ordered_json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", e}, {"re", c.real()}, {"im", c.imag()}});
  return {{"text", p.to_string()}, {"terms", terms}};
}

}  // namespace

RunResult star_report(const StarRequest& req) {
  Poly f = located("lhs", [&] { return parse_poly(req.lhs); });
  Poly g = located("rhs", [&] { return parse_poly(req.rhs); });
  ordered_json config = {{"product", req.product}, {"lhs", req.lhs}, {"rhs", req.rhs}};
  StarProduct P;
  int N = std::max(f.nvars(), g.nvars());
  if (req.product == "moyal") {
    if (req.theta_csv.empty()) throw ConfigError("moyal needs --theta");
    const int k = theta_size(req.theta_csv);
    if (N > k) throw ConfigError("polynomials use more variables than theta covers");
    N = k;
    P = MoyalProduct{located("theta", [&] { return ThetaMatrix::from_csv(req.theta_csv, k); })};
    config["theta"] = req.theta_csv;
  } else if (req.product == "lie") {
    if (req.structure_json.empty()) throw ConfigError("lie needs --structure");
    json sj;
    try {
      sj = json::parse(req.structure_json);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("structure: malformed JSON: ") + e.what(), e.byte);
    }
    LieStructure L = parse_structure(sj);
    if (L.jacobi_residual() > 1e-9) throw ConfigError("structure constants violate the Jacobi identity");
    if (N > L.dim) throw ConfigError("polynomials use more variables than the algebra has generators");
    if (req.lie_order < 1 || req.lie_order > kMaxLieStarOrder) throw ConfigError("lie order must be 1 or 2");
    N = L.dim;
    config["structure"] = sj;
    config["order"] = req.lie_order;
    P = LieProduct{L, req.lie_order};
  } else if (req.product == "qplane") {
    cdouble q = 1.0;
    if (!req.q.empty()) {
      Poly qp = located("q", [&] { return parse_poly(req.q, 0); });
      if (qp.degree() > 0) throw ConfigError("q must be a constant");
      q = qp.terms().empty() ? cdouble(0.0) : qp.terms().begin()->second;
    }
    if (std::abs(q) == 0.0) throw ConfigError("q must be nonzero");
    if (N > 2) throw ConfigError("the quantum plane has two variables");
    N = 2;
    QPlaneOrdering ord;
    if (req.ordering == "normal") ord = QPlaneOrdering::Normal;
    else if (req.ordering == "symmetric") ord = QPlaneOrdering::Symmetric;
    else throw ConfigError("ordering must be normal or symmetric");
    config["q"] = {q.real(), q.imag()};
    config["ordering"] = req.ordering;
    P = QPlaneProduct{q, ord};
  } else {
    throw ConfigError("product must be moyal, lie or qplane");
  }
  f = f.widen(N);
  g = g.widen(N);
  Poly fg = star(f, g, P);
  ordered_json summary;
  summary["product"] = poly_json(fg);
  summary["commutator"] = poly_json(star_commutator(f, g, P));
  summary["pass"] = true;
  RunResult r;
  r.report = report(std::move(config), ordered_json::array(), std::move(summary));
  if (!all_finite(r.report)) {
    r.status = 4;
    r.message = "non-finite coefficient";
  }
  return r;
}

// ---- sw ------------------------------------------------------------------------------

RunResult sw_report(const std::string& text) {
  ordered_json j = parse_json(text);
  check_keys(j, "config", {"shape", "algebra", "eta", "l", "theta", "q1", "gamma1", "varsigma1", "points",
                           "samples", "scales", "full_tensors"});
  if (!j.contains("shape") || !j.contains("q1") || !j.contains("theta"))
    throw ConfigError("sw config needs shape, q1 and theta");
  check_keys(j["shape"], "shape", {"n", "m"});
  const BundleShape sh{get_int(j["shape"].value("n", ordered_json()), "shape.n"),
                       get_int(j["shape"].value("m", ordered_json()), "shape.m")};
  validate(sh);
  const int d = sh.dim();

  // Algebra and, where one exists, a matrix representation.
  LieStructure L;
  std::optional<GaugeRepresentation> rep;
  ordered_json alg = j.value("algebra", ordered_json("desitter"));
  if (alg.is_string() && alg.get<std::string>() == "desitter") {
    std::array<int, 5> eta{1, 1, 1, 1, -1};
    if (j.contains("eta")) {
      if (!j["eta"].is_array() || j["eta"].size() != 5) throw ConfigError("eta needs five entries");
      for (int k = 0; k < 5; ++k) eta[k] = get_int(j["eta"][k], "eta");
    }
    const double l = j.contains("l") ? get_number(j["l"], "l") : 1.0;
    DeSitterAlgebra A = desitter_algebra(eta, l);
    L = A.structure;
    rep = GaugeRepresentation::desitter(A);
  } else if (alg.is_string() && alg.get<std::string>() == "su2") {
    L = LieStructure::su2();
    rep = GaugeRepresentation::su2();
  } else {
    L = parse_structure(json::parse(alg.dump()));
    if (L.jacobi_residual() > 1e-9) throw ConfigError("structure constants violate the Jacobi identity");
  }

  ThetaMatrix th;
  if (j["theta"].is_string()) {
    th = located("theta", [&] { return ThetaMatrix::from_csv(j["theta"].get<std::string>(), d); });
  } else {
    if (!j["theta"].is_array() || j["theta"].size() != static_cast<std::size_t>(d))
      throw ConfigError("theta matrix needs one row per coordinate");
    Eigen::MatrixXd m(d, d);
    for (int a = 0; a < d; ++a) {
      if (!j["theta"][a].is_array() || j["theta"][a].size() != static_cast<std::size_t>(d))
        throw ConfigError("theta rows need one entry per coordinate");
      for (int b = 0; b < d; ++b) m(a, b) = get_number(j["theta"][a][b], "theta");
    }
    th = ThetaMatrix::from_matrix(m);
  }
  if ((th.theta + th.theta.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError("theta must be antisymmetric");

  auto q = string_rows(j["q1"], "q1");
  std::vector<std::string> gamma, varsigma;
  if (j.contains("gamma1")) gamma = string_list(j["gamma1"], "gamma1");
  if (j.contains("varsigma1")) varsigma = string_list(j["varsigma1"], "varsigma1");
  GaugeLevel1 f = located("q1", [&] { return GaugeLevel1::parse(q, gamma, sh); });
  if (f.S != L.dim) throw ConfigError("q1 rows need one entry per generator of the algebra");
  std::optional<GaugeLevel1> fs;
  if (!varsigma.empty()) fs = located("varsigma1", [&] { return GaugeLevel1::parse(q, varsigma, sh); });

  std::vector<std::vector<double>> pts;
  ordered_json config = j;
  if (j.contains("points")) {
    if (j.contains("samples")) throw ConfigError("give either points or samples");
    if (!j["points"].is_array()) throw ConfigError("points must be an array");
    for (const auto& p : j["points"]) {
      if (!p.is_array() || p.size() != static_cast<std::size_t>(d)) throw ConfigError("each point needs n + m coordinates");
      std::vector<double> u;
      for (const auto& x : p) u.push_back(get_number(x, "points"));
      pts.push_back(u);
    }
  } else {
    SampleSpec s;
    s.count = 3;
    if (j.contains("samples")) {
      check_keys(j["samples"], "samples", {"count", "seed"});
      if (j["samples"].contains("count")) s.count = get_int(j["samples"]["count"], "samples.count");
      if (j["samples"].contains("seed")) s.seed = j["samples"]["seed"].get<std::uint64_t>();
    }
    pts = sample_points(sh, s);
    config["samples"] = {{"count", s.count}, {"seed", s.seed}};
  }
  if (pts.empty()) throw ConfigError("no points");
  std::vector<double> scales = {1.0, 0.5, 0.25};
  if (j.contains("scales")) {
    scales.clear();
    for (const auto& x : j["scales"]) scales.push_back(get_number(x, "scales"));
    if (scales.size() < 2) throw ConfigError("scales needs at least two entries");
  }
  const bool full = j.value("full_tensors", false);

  ordered_json out = ordered_json::array();
  int degenerate = 0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const auto& u = pts[i];
    ordered_json p = {{"index", i}, {"u", u}};
    try {
      GaugeJets J = gauge_jets(f, u, 3);
      GaugeLevel2 l2 = sw_expand(J, th, L);
      CorrectedCurvature cc = corrected_curvature(J, th, L);
      RealTensor R1 = cc.R1;
      double anti = 0.0;
      for (int t = 0; t < d; ++t)
        for (int m = 0; m < d; ++m)
          for (int a = 0; a < L.dim; ++a) anti = std::max(anti, std::abs(R1(t, m, a) + R1(m, t, a)));
      p["status"] = "ok";
      p["q2_max"] = max_abs(l2.q2);
      if (l2.gamma2.size()) p["gamma2_max"] = max_abs(l2.gamma2);
      p["R1_max"] = max_abs(R1);
      p["R2_max"] = max_abs(cc.R2);
      p["curvature_antisymmetry"] = anti;
      if (full) {
        p["q2"] = tensor_json(l2.q2);
        if (l2.gamma2.size()) p["gamma2"] = tensor_json(l2.gamma2);
        p["R1"] = tensor_json(R1);
        p["R2"] = tensor_json(cc.R2);
      }
      if (rep) {
        SwResidual sw = sw_residual(J, th, *rep, scales);
        p["sw_residual"] = {{"scales", sw.scales}, {"residuals", sw.residuals}, {"order0", sw.order0},
                            {"order1", sw.order1}, {"slope", sw.slope},
                            {"slope_error", std::abs(sw.slope - 2.0)}};
        if (J.gamma.size()) p["covariance"] = covariance_residual(J, th, *rep);
        if (fs && J.gamma.size()) {
          ClosureResidual c = closure_check(J.q, J.gamma, parameter_jets(fs->gamma1, u, 3), th, *rep);
          p["closure"] = {{"level1", c.level1}, {"order_theta", c.order_theta}};
        }
      }
    } catch (const NumericError& e) {
      p["status"] = "degenerate";
      p["diagnostic"] = e.what();
      ++degenerate;
    }
    out.push_back(std::move(p));
  }

  bool pass = true;
  ordered_json summary;
  summary["points"] = static_cast<int>(pts.size());
  summary["degenerate"] = degenerate;
  summary["algebra_dim"] = L.dim;
  summary["representation"] = rep.has_value();
  summary["invariants"] = summarize(out,
                                    {{"curvature antisymmetry", "curvature_antisymmetry", 1e-12},
                                     {"sw theta^0 terms", "sw_residual.order0", 1e-12},
                                     {"sw theta^1 terms", "sw_residual.order1", 1e-12},
                                     {"sw slope - 2", "sw_residual.slope_error", 0.1},
                                     {"covariance", "covariance", 1e-9},
                                     {"closure level 1", "closure.level1", 1e-9},
                                     {"closure order theta", "closure.order_theta", 1e-9}},
                                    pass);
  summary["pass"] = pass;
  RunResult r;
  r.report = report(std::move(config), std::move(out), std::move(summary));
  if (degenerate > 0 || !all_finite(r.report)) {
    r.status = 4;
    r.message = "numeric degeneracy in the gauge fields";
  } else if (!pass) {
    r.status = 1;
    r.message = "Seiberg-Witten invariants failed";
  }
  return r;
}

// ---- verify --------------------------------------------------------------------------

RunResult verify_report(const std::string& suite, const VerifyOptions& opts) {
  auto checks = verify_suite(suite, opts);
  ordered_json list = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json e = {{"suite", c.suite}, {"name", c.name}};
    e["value"] = std::isfinite(c.value) ? ordered_json(c.value) : ordered_json(nullptr);
    e["tol"] = c.tol;
    e["relation"] = c.lower_bound ? "above" : "at_most";
    e["pass"] = c.pass;
    if (!c.error.empty()) e["error"] = c.error;
    list.push_back(std::move(e));
  }
  ordered_json summary;
  summary["checks"] = list;
  const Check* bad = first_failure(checks);
  summary["first_failure"] = bad ? ordered_json(bad->suite + "/" + bad->name) : ordered_json(nullptr);
  summary["pass"] = bad == nullptr;
  RunResult r;
  r.report = report({{"suite", suite}, {"seed", opts.seed}}, ordered_json::array(), std::move(summary));
  if (bad) {
    r.status = 1;
    r.message = "verification failed: " + bad->suite + "/" + bad->name;
  }
  return r;
}

}  // namespace dgeom
