#include "fracbound/cli_report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"
#include "fracbound/spec_json.hpp"

namespace fracbound {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigParseError(where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (j.is_string() && (j == "inf" || j == "Infinity")) return kInf;
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) return {number(j, where)};
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::size_t> grid_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of grid sizes");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto w = where + "[" + std::to_string(k) + "]";
    if (!j[k].is_number_integer() || j[k].get<long long>() < 4) fail(w, "grid size must be an integer >= 4");
    out.push_back(j[k].get<std::size_t>());
  }
  return out;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

bool flag(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

// Which FracParams fields a theorem reads; a missing required field is a parse error.
struct Needs {
  bool alpha = false, p = false, gamma = false, q = false, n = false;
};

const std::map<std::string, Needs>& theorem_table() {
  static const std::map<std::string, Needs> t = {
      {"supercritical-continuity", {true, true, false, false, false}},
      {"wrl-bound", {true, false, true, false, false}},
      {"linf-holder", {true, false, false, false, false}},
      {"linf-holder-sharpness", {true, false, false, true, false}},
      {"embedding", {false, true, false, false, false}},
      {"power-oracle", {true, false, true, false, false}},
      {"scheme-equivalence", {true, false, false, false, false}},
      {"holder-regularity", {true, true, false, false, false}},
      {"holder-sharpness", {true, true, false, true, false}},
      {"critical-bk", {false, true, false, false, true}},
      {"weak-noninclusion", {true, false, false, true, false}},
      {"linf-general", {true, false, false, false, false}},
      {"inversion", {true, false, false, false, false}},
      {"commutation", {true, false, false, false, false}},
      {"semigroup", {true, false, false, false, false}},
      {"semigroup-bound", {true, false, false, false, false}},
  };
  return t;
}

CheckSpec check_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find("theorem");
  if (it == j.end()) fail(where, "missing field 'theorem'");
  CheckSpec c;
  c.theorem = text(*it, where + ".theorem");
  const auto known = theorem_table().find(c.theorem);
  if (known == theorem_table().end()) fail(where + ".theorem", "unknown theorem '" + c.theorem + "'");
  const Needs& need = known->second;

  auto opt = [&](const char* key) -> const json* {
    auto f = j.find(key);
    if (f != j.end()) return &*f;
    return nullptr;
  };
  auto required = [&](bool needed, const char* key) {
    if (needed && !opt(key)) fail(where, std::string("theorem '") + c.theorem + "' needs field '" + key + "'");
  };
  required(need.alpha, "alpha");
  required(need.p, "p");
  required(need.gamma, "gamma");
  required(need.q, "q");
  required(need.n, "n");

  c.params.alpha = 0.0;
  if (auto* v = opt("alpha")) c.params.alpha = number(*v, where + ".alpha");
  c.params.p = 1.0;
  if (auto* v = opt("p")) c.params.p = number(*v, where + ".p");
  if (auto* v = opt("gamma")) c.params.gamma = number(*v, where + ".gamma");
  if (auto* v = opt("q")) c.params.q = number(*v, where + ".q");
  if (auto* v = opt("beta")) c.params.beta = number(*v, where + ".beta");
  if (auto* v = opt("n")) {
    if (!v->is_number_integer()) fail(where + ".n", "expected an integer");
    c.params.n = v->get<int>();
  }
  if (auto* v = opt("sharpness")) c.sharpness = numbers(*v, where + ".sharpness");
  if (auto* v = opt("tol")) c.tol = number(*v, where + ".tol");
  if (auto* v = opt("bound")) c.bound = number(*v, where + ".bound");
  if (auto* v = opt("grids")) c.grids = grid_list(*v, where + ".grids");
  if (auto* v = opt("function")) c.function = spec_from_json(*v, where + ".function");
  if (auto* v = opt("corpus")) {
    const auto s = text(*v, where + ".corpus");
    if (s != "all" && s != "smooth") fail(where + ".corpus", "expected \"all\" or \"smooth\"");
    c.smooth_only = s == "smooth";
  }
  if (!c.grids.empty() && c.grids.size() < 4) fail(where + ".grids", "a refinement study needs at least 4 grids");
  return c;
}

json check_to_json(const CheckSpec& c) {
  json j;
  j["theorem"] = c.theorem;
  if (c.params.alpha > 0.0) j["alpha"] = c.params.alpha;
  if (std::isinf(c.params.p))
    j["p"] = "inf";
  else
    j["p"] = c.params.p;
  if (c.params.gamma) j["gamma"] = *c.params.gamma;
  if (c.params.q) j["q"] = *c.params.q;
  if (c.params.beta) j["beta"] = *c.params.beta;
  if (c.params.n) j["n"] = *c.params.n;
  if (!c.sharpness.empty()) j["sharpness"] = c.sharpness;
  if (c.tol) j["tol"] = *c.tol;
  if (c.bound) j["bound"] = *c.bound;
  if (!c.grids.empty()) j["grids"] = c.grids;
  if (c.function) j["function"] = to_json(*c.function);
  if (c.smooth_only) j["corpus"] = "smooth";
  return j;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json row_to_json(const ResultRow& r, bool timings) {
  json j;
  j["theorem"] = r.theorem;
  j["params"] = r.params;
  j["function"] = r.function;
  j["n"] = r.n;
  j["kind"] = r.study ? "study" : "check";
  j["verdict"] = r.verdict;
  j["pass"] = r.pass;
  j["detail"] = r.detail;
  if (r.error) return j;
  if (r.study) {
    j["value"] = finite_or_null(r.lhs);
    j["exponent"] = finite_or_null(r.rhs);
    j["expected"] = r.expected;
    j["grids"] = r.grids;
    json vals = json::array();
    for (double v : r.values) vals.push_back(finite_or_null(v));
    j["values"] = vals;
  } else {
    j["lhs"] = finite_or_null(r.lhs);
    j["rhs"] = finite_or_null(r.rhs);
    j["margin"] = finite_or_null(r.margin);
    j["tol"] = r.tol;
  }
  if (timings) j["seconds"] = r.seconds;
  return j;
}

ResultRow error_row(const std::string& theorem, const FracParams& params, const std::string& function,
                    std::size_t n, const std::string& what) {
  ResultRow r;
  r.theorem = theorem;
  r.params = params.describe();
  r.function = function;
  r.n = n;
  r.verdict = "error";
  r.error = true;
  r.detail = what;
  return r;
}

struct TaskOutput {
  std::vector<ResultRow> rows;
  std::size_t skipped = 0;
};

using Task = std::function<void(TaskOutput&)>;

// Wraps a check body: hypothesis violations are skipped, anything else is an error row.
Task guarded(std::string theorem, FracParams params, std::string function, std::size_t n,
             std::function<void(std::vector<ResultRow>&)> body) {
  return [=](TaskOutput& out) {
    try {
      body(out.rows);
    } catch (const ParamsOutOfScope&) {
      ++out.skipped;
    } catch (const std::exception& e) {
      out.rows.push_back(error_row(theorem, params, function, n, e.what()));
    }
  };
}

std::vector<Task> plan(const RunConfig& cfg) {
  std::vector<Task> tasks;
  for (const auto& c : cfg.checks) {
    std::vector<AnalyticSpec> fns;
    if (c.function) {
      fns.push_back(*c.function);
    } else {
      for (const auto& f : cfg.corpus)
        if (!c.smooth_only || is_smooth(f)) fns.push_back(f);
    }
    auto opts = [&](std::size_t n) {
      BenchOptions o;
      o.scheme = cfg.scheme;
      o.convention = cfg.convention;
      o.n = n;
      o.tol = c.tol.value_or(cfg.tol);
      o.grids = c.grids;
      return o;
    };
    const auto& P = c.params;
    const std::size_t finest = cfg.grids.back();
    auto each_grid = [&](const AnalyticSpec& f, std::function<TheoremCheck(const BenchOptions&)> fn) {
      for (auto n : cfg.grids)
        tasks.push_back(guarded(c.theorem, P, f.label(), n, [fn, o = opts(n)](auto& rows) {
          rows.push_back(to_row(fn(o)));
        }));
    };
    auto once = [&](const std::string& label, std::function<void(std::vector<ResultRow>&)> body) {
      tasks.push_back(guarded(c.theorem, P, label, finest, std::move(body)));
    };
    const auto o = opts(finest);
    const auto& t = c.theorem;

    if (t == "supercritical-continuity") {
      for (const auto& f : fns)
        each_grid(f, [f, P](const BenchOptions& b) { return check_supercritical_sup(f, P.alpha, P.p, b); });
    } else if (t == "wrl-bound") {
      for (const auto& f : fns)
        each_grid(f, [f, P](const BenchOptions& b) { return check_wrl_bound(f, P.alpha, *P.gamma, b); });
    } else if (t == "linf-holder") {
      for (const auto& f : fns)
        each_grid(f, [f, P](const BenchOptions& b) { return check_linf_holder(f, P.alpha, b); });
      auto rs = c.sharpness;
      if (rs.empty()) rs.push_back((P.alpha + 1.0) / 2.0);
      for (double r : rs)
        once("const(1)", [P, r, o](auto& rows) { rows.push_back(to_row(check_linf_holder_sharpness(P.alpha, r, o))); });
    } else if (t == "linf-holder-sharpness") {
      once("const(1)", [P, o](auto& rows) { rows.push_back(to_row(check_linf_holder_sharpness(P.alpha, *P.q, o))); });
    } else if (t == "embedding") {
      for (const auto& f : fns)
        each_grid(f, [f, P](const BenchOptions& b) {
          return P.q ? check_weak_embedding(f, P.p, *P.q, P.alpha, b) : check_chebyshev(f, P.p, P.alpha, b);
        });
    } else if (t == "power-oracle") {
      const double bound = c.bound.value_or(1e-6);
      const auto label = AnalyticSpec::power(*P.gamma).label();
      for (auto n : cfg.grids)
        tasks.push_back(guarded(t, P, label, n, [P, bound, b = opts(n)](auto& rows) {
          rows.push_back(to_row(check_power_oracle(*P.gamma, P.alpha, bound, b)));
        }));
      once(label, [P, o](auto& rows) { rows.push_back(to_row(study_power_oracle(*P.gamma, P.alpha, o))); });
    } else if (t == "scheme-equivalence") {
      for (const auto& f : fns)
        each_grid(f, [f, P](const BenchOptions& b) { return check_scheme_equivalence(f, P.alpha, b.n); });
    } else if (t == "holder-regularity") {
      for (const auto& f : fns)
        once(f.label(), [f, P, o](auto& rows) { rows.push_back(to_row(check_holder_regularity(f, P.alpha, P.p, o))); });
    } else if (t == "holder-sharpness") {
      once("t^gamma", [P, o](auto& rows) {
        rows.push_back(to_row(check_holder_sharpness(P.p, P.alpha, *P.q, P.gamma, o)));
      });
    } else if (t == "critical-bk") {
      for (const auto& f : fns)
        once(f.label(), [f, P, o](auto& rows) {
          auto r = check_critical_bk(f, P.p, *P.n, P.gamma, o);
          rows.push_back(to_row(r.ratio));
          rows.push_back(to_row(r.derivative));
        });
    } else if (t == "weak-noninclusion") {
      const auto fn = c.function;
      once(fn ? fn->label() : log_damped_family().label(), [fn, P, o](auto& rows) {
        rows.push_back(to_row(check_weak_noninclusion(P.alpha, *P.q, fn, o)));
      });
    } else if (t == "linf-general") {
      for (const auto& f : fns)
        once(f.label(), [f, P, o](auto& rows) { rows.push_back(to_row(check_linf_general(f, P.alpha, o))); });
    } else if (t == "semigroup-bound") {
      const double bound = c.bound.value_or(1e-4);
      for (const auto& f : fns)
        once(f.label(), [f, P, o, bound](auto& rows) {
          const auto r = check_identities(f, P.alpha, IdentityVariant::semigroup, P.beta, o);
          TheoremCheck k;
          k.tag = "semigroup-bound";
          k.params = r.full.params;
          k.function = r.full.function;
          k.n = r.full.grids.back();
          k.lhs = r.full.values.back();
          k.rhs = bound;
          k.margin = k.rhs - k.lhs;
          k.pass = k.lhs <= k.rhs;
          k.detail = "max residual of J^alpha J^beta f - J^{alpha+beta} f over all nodes";
          k.seconds = r.full.seconds;
          rows.push_back(to_row(k));
        });
    } else {
      const auto variant = identity_from_string(t);
      for (const auto& f : fns)
        once(f.label(), [f, P, o, variant](auto& rows) {
          auto r = check_identities(f, P.alpha, variant, P.beta, o);
          rows.push_back(to_row(r.interior));
          rows.push_back(to_row(r.full));
        });
    }
  }
  return tasks;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << content;
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

std::string plot_name(const ResultRow& r) {
  std::string stem = r.theorem + "__" + r.params + "__" + r.function;
  for (auto& ch : stem)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-' && ch != '=' && ch != '_') ch = '_';
  if (stem.size() > 120) stem.resize(120);
  return stem + "_" + hex(fnv1a(r.theorem + "|" + r.params + "|" + r.function)).substr(0, 8) + ".dat";
}

std::string verdict_of(const json& r) { return r.at("verdict").get<std::string>(); }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("config", "expected an object");
  RunConfig cfg;
  bool have_checks = false;
  if (auto it = j.find("suite"); it != j.end()) {
    if (text(*it, "config.suite") != "full") fail("config.suite", "only \"full\" is defined");
    cfg = full_suite_config();
    have_checks = true;
  }
  if (auto it = j.find("corpus"); it != j.end()) {
    if (it->is_string() && *it == "default") {
      cfg.corpus = default_corpus();
    } else {
      if (!it->is_array()) fail("config.corpus", "expected an array of function specs or \"default\"");
      cfg.corpus.clear();
      for (std::size_t k = 0; k < it->size(); ++k)
        cfg.corpus.push_back(spec_from_json((*it)[k], "config.corpus[" + std::to_string(k) + "]"));
    }
  } else if (!have_checks) {
    cfg.corpus = default_corpus();
  }
  if (auto it = j.find("checks"); it != j.end()) {
    if (!it->is_array()) fail("config.checks", "expected an array");
    cfg.checks.clear();
    for (std::size_t k = 0; k < it->size(); ++k)
      cfg.checks.push_back(check_from_json((*it)[k], "config.checks[" + std::to_string(k) + "]"));
  }
  if (auto it = j.find("grids"); it != j.end()) cfg.grids = grid_list(*it, "config.grids");
  if (auto it = j.find("scheme"); it != j.end()) {
    try {
      cfg.scheme = scheme_from_string(text(*it, "config.scheme"));
    } catch (const InvalidArgument& e) {
      fail("config.scheme", e.what());
    }
  }
  if (auto it = j.find("convention"); it != j.end()) {
    const auto s = text(*it, "config.convention");
    if (s == "strictCeil")
      cfg.convention = OrderConvention::strictCeil;
    else if (s == "ceil")
      cfg.convention = OrderConvention::ceil;
    else
      fail("config.convention", "expected \"strictCeil\" or \"ceil\"");
  }
  if (auto it = j.find("tol"); it != j.end()) {
    cfg.tol = number(*it, "config.tol");
    if (!(cfg.tol >= 0.0)) fail("config.tol", "must be >= 0");
  }
  if (auto it = j.find("outputDir"); it != j.end()) cfg.output_dir = text(*it, "config.outputDir");
  if (auto it = j.find("timings"); it != j.end()) cfg.timings = flag(*it, "config.timings");
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    // Turn the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < body.size(); ++k) {
      if (body[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigParseError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                           ": malformed JSON");
  }
  return config_from_json(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  json corpus = json::array();
  for (const auto& f : cfg.corpus) corpus.push_back(to_json(f));
  j["corpus"] = corpus;
  json checks = json::array();
  for (const auto& c : cfg.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  j["grids"] = cfg.grids;
  j["scheme"] = to_string(cfg.scheme);
  j["convention"] = cfg.convention == OrderConvention::ceil ? "ceil" : "strictCeil";
  j["tol"] = cfg.tol;
  j["outputDir"] = cfg.output_dir.string();
  j["timings"] = cfg.timings;
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  // The output location does not change results.
  auto j = to_json(cfg);
  j.erase("outputDir");
  return hex(fnv1a(j.dump()));
}

RunConfig full_suite_config() {
  RunConfig cfg;
  cfg.corpus = default_corpus();
  cfg.grids = {4096};
  auto add = [&](std::string theorem, double alpha, double p = 1.0) -> CheckSpec& {
    CheckSpec c;
    c.theorem = std::move(theorem);
    c.params.alpha = alpha;
    c.params.p = p;
    cfg.checks.push_back(c);
    return cfg.checks.back();
  };

  for (double g : {0.0, 0.5, 1.0, 2.0})
    for (double a : {0.25, 0.5, 0.75, 1.5}) add("power-oracle", a).params.gamma = g;
  for (double a : {0.5, 1.5}) add("scheme-equivalence", a);

  for (double p : {1.5, 2.0, 4.0})
    for (double a : {0.6, 0.75, 0.9, 1.5}) add("supercritical-continuity", a, p);
  for (double a : {1.0, 1.5, 2.0}) {
    std::vector<double> gammas = {0.5, 1.0};
    if (a != 1.0) gammas.push_back(a);
    for (double g : gammas) add("wrl-bound", a).params.gamma = g;
  }
  add("linf-holder", 0.25);
  add("linf-holder", 0.5).sharpness = {0.6, 0.75};
  add("linf-holder", 0.75);
  for (double p : {1.0, 2.0}) {
    add("embedding", 0.0, p);
    add("embedding", 0.5, p);
  }
  for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{1.5, 4.0}}) {
    add("embedding", 0.0, p).params.q = q;
    add("embedding", 0.5, p).params.q = q;
  }

  add("holder-sharpness", 0.75, 2.0).params.q = 0.5;
  {
    auto& c = add("holder-sharpness", 0.75, 2.0);
    c.params.q = 0.5;
    c.params.gamma = -0.4;
  }
  add("holder-sharpness", 0.5, 4.0).params.q = 0.4;
  add("weak-noninclusion", 0.5).params.q = 3.0;
  add("weak-noninclusion", 0.5).params.q = 2.0;
  {
    auto& c = add("weak-noninclusion", 0.5);
    c.params.q = 3.0;
    c.function = AnalyticSpec::constant({1.0});
  }

  for (double a : {0.75, 1.2, 1.75}) add("holder-regularity", a, 2.0);
  {
    auto& c = add("critical-bk", 0.0, 2.0);
    c.params.n = 1;
  }
  for (double a : {1.5, 2.0}) add("linf-general", a);

  add("inversion", 0.5).smooth_only = true;
  add("commutation", 0.5).smooth_only = true;
  add("semigroup", 0.3).smooth_only = true;
  add("semigroup-bound", 0.3).smooth_only = true;
  return cfg;
}

// ---------------------------------------------------------------------------
// Rows

ResultRow to_row(const TheoremCheck& c) {
  ResultRow r;
  r.theorem = c.tag;
  r.params = c.params.describe();
  r.function = c.function;
  r.n = c.n;
  r.lhs = c.lhs;
  r.rhs = c.rhs;
  r.margin = c.rhs - c.lhs;
  r.pass = c.pass;
  r.verdict = c.pass ? "pass" : "fail";
  r.tol = c.tol;
  r.detail = c.detail;
  r.seconds = c.seconds;
  return r;
}

ResultRow to_row(const ConvergenceStudy& s) {
  ResultRow r;
  r.theorem = s.tag;
  r.params = s.params.describe();
  r.function = s.function;
  r.n = s.grids.back();
  r.study = true;
  r.lhs = s.values.back();
  r.rhs = s.exponent;
  r.pass = s.pass();
  r.verdict = r.pass ? to_string(s.verdict) : "fail:" + to_string(s.verdict);
  r.expected = to_string(s.expected);
  r.detail = s.detail;
  r.grids = s.grids;
  r.values = s.values;
  r.seconds = s.seconds;
  return r;
}

std::string csv_header() { return "theorem,params,function,n,lhs,rhs,margin,verdict,seconds"; }

std::string csv_line(const ResultRow& r, bool timings) {
  std::string line = csv_field(r.theorem) + "," + csv_field(r.params) + "," + csv_field(r.function) + "," +
                     std::to_string(r.n) + ",";
  if (!r.error) {
    line += exact_num(r.lhs) + "," + exact_num(r.rhs) + ",";
    if (!r.study) line += exact_num(r.margin);
  } else {
    line += ",,";
  }
  line += "," + csv_field(r.verdict) + ",";
  if (timings) line += exact_num(r.seconds);
  return line;
}

// ---------------------------------------------------------------------------
// Execution

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACBOUND_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

std::vector<ResultRow> execute(const RunConfig& cfg, RunCounts& counts, std::size_t threads) {
  if (cfg.grids.empty()) throw ConfigParseError("config.grids: must be nonempty");
  const auto tasks = plan(cfg);
  std::vector<TaskOutput> outputs(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) tasks[k](outputs[k]);
  };
  threads = std::max<std::size_t>(1, std::min(threads, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  counts = {};
  std::vector<ResultRow> rows;
  for (auto& o : outputs) {
    counts.skipped += o.skipped;
    for (auto& r : o.rows) rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.theorem, a.params, a.function, a.n) < std::tie(b.theorem, b.params, b.function, b.n);
  });
  for (const auto& r : rows) {
    if (r.error) {
      ++counts.error;
      continue;
    }
    ++(r.pass ? counts.pass : counts.fail);
    if (r.study) {
      const bool div = r.verdict.ends_with("diverging");
      ++(div ? counts.diverging : counts.bounded);
    }
  }
  return rows;
}

RunManifest run(const RunConfig& cfg) {
  RunManifest m;
  m.started_at = iso_now();
  m.config_hash = config_hash(cfg);
  m.threads = worker_count();

  std::error_code ec;
  fs::create_directories(cfg.output_dir / "plots", ec);
  if (ec) throw InvalidArgument("cannot create " + cfg.output_dir.string() + ": " + ec.message());

  const auto rows = execute(cfg, m.counts, m.threads);
  m.finished_at = iso_now();
  m.status = m.counts.error ? "partialFailure" : "complete";

  // Single writer: everything below runs on this thread after the workers joined.
  std::string csv = csv_header() + "\n";
  json results = json::array();
  for (const auto& r : rows) {
    csv += csv_line(r, cfg.timings) + "\n";
    results.push_back(row_to_json(r, cfg.timings));
  }
  write_file(cfg.output_dir / "results.csv", csv);
  write_file(cfg.output_dir / "results.json", results.dump(2) + "\n");

  for (const auto& entry : fs::directory_iterator(cfg.output_dir / "plots"))
    if (entry.path().extension() == ".dat") fs::remove(entry.path());
  for (const auto& r : rows) {
    if (!r.study) continue;
    std::string dat = "# " + r.theorem + " " + r.params + " " + r.function + "\n# n value\n";
    for (std::size_t k = 0; k < r.grids.size(); ++k)
      dat += std::to_string(r.grids[k]) + " " + exact_num(r.values[k]) + "\n";
    write_file(cfg.output_dir / "plots" / plot_name(r), dat);
  }

  json mj;
  mj["configHash"] = m.config_hash;
  mj["toolVersion"] = m.tool_version;
  mj["startedAt"] = m.started_at;
  mj["finishedAt"] = m.finished_at;
  mj["status"] = m.status;
  mj["threads"] = m.threads;
  mj["rows"] = rows.size();
  mj["counts"] = {{"pass", m.counts.pass},           {"fail", m.counts.fail},
                  {"error", m.counts.error},         {"skipped", m.counts.skipped},
                  {"diverging", m.counts.diverging}, {"bounded", m.counts.bounded}};
  mj["config"] = to_json(cfg);
  write_file(cfg.output_dir / "manifest.json", mj.dump(2) + "\n");
  return m;
}

// ---------------------------------------------------------------------------
// Report

int report(const fs::path& dir, std::ostream& out) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw MissingManifest(manifest_path.string() + " not found");
  json manifest, results;
  try {
    std::ifstream(manifest_path) >> manifest;
    std::ifstream rin(dir / "results.json");
    if (!rin) throw MissingManifest((dir / "results.json").string() + " not found");
    rin >> results;
  } catch (const json::exception& e) {
    throw MissingManifest(std::string("unreadable result files: ") + e.what());
  }

  struct Tally {
    std::size_t rows = 0, pass = 0, fail = 0, error = 0, bounded = 0, diverging = 0;
    double min_exp = kInf, max_exp = -kInf;
  };
  std::map<std::string, Tally> by_theorem;
  std::vector<const json*> bad;
  for (const auto& r : results) {
    auto& t = by_theorem[r.at("theorem").get<std::string>()];
    ++t.rows;
    const auto verdict = r.at("verdict").get<std::string>();
    if (verdict == "error") {
      ++t.error;
      bad.push_back(&r);
      continue;
    }
    if (r.at("pass").get<bool>()) {
      ++t.pass;
    } else {
      ++t.fail;
      bad.push_back(&r);
    }
    if (r.at("kind") == "study") {
      ++(verdict.ends_with("diverging") ? t.diverging : t.bounded);
      if (r.at("exponent").is_number()) {
        const double e = r.at("exponent").get<double>();
        t.min_exp = std::min(t.min_exp, e);
        t.max_exp = std::max(t.max_exp, e);
      }
    }
  }

  char line[256];
  out << "run " << manifest.value("configHash", "?") << "  tool " << manifest.value("toolVersion", "?") << "  "
      << manifest.value("startedAt", "?") << " .. " << manifest.value("finishedAt", "?") << "\n\n";
  std::snprintf(line, sizeof line, "%-26s %5s %5s %5s %5s %7s %9s  %s\n", "theorem", "rows", "pass", "fail", "error",
                "bounded", "diverging", "exponents");
  out << line;
  std::size_t fails = 0;
  for (const auto& [name, t] : by_theorem) {
    std::string exps;
    if (t.bounded + t.diverging > 0 && std::isfinite(t.min_exp))
      exps = t.min_exp == t.max_exp ? short_num(t.min_exp) : short_num(t.min_exp) + " .. " + short_num(t.max_exp);
    std::snprintf(line, sizeof line, "%-26s %5zu %5zu %5zu %5zu %7zu %9zu  %s\n", name.c_str(), t.rows, t.pass,
                  t.fail, t.error, t.bounded, t.diverging, exps.c_str());
    out << line;
    fails += t.fail + t.error;
  }
  if (manifest.contains("counts")) out << "\nskipped (outside hypothesis): " << manifest["counts"].value("skipped", 0) << "\n";

  if (!bad.empty()) {
    out << "\nfailures:\n";
    for (const auto* r : bad) {
      out << "  " << r->at("theorem").get<std::string>() << "  " << r->at("params").get<std::string>() << "  "
          << r->at("function").get<std::string>() << "  n=" << r->at("n").get<std::size_t>() << "  "
          << r->at("verdict").get<std::string>();
      if (r->contains("expected") && !verdict_of(*r).ends_with(r->at("expected").get<std::string>()))
        out << " (expected " << r->at("expected").get<std::string>() << ")";
      if (r->contains("lhs") && r->at("lhs").is_number() && r->at("rhs").is_number())
        out << "  lhs=" << short_num(r->at("lhs").get<double>()) << " rhs=" << short_num(r->at("rhs").get<double>());
      if (r->contains("exponent") && r->at("exponent").is_number())
        out << "  exponent=" << short_num(r->at("exponent").get<double>());
      out << "  " << r->at("detail").get<std::string>() << "\n";
    }
  }
  out << "\n" << (fails == 0 ? "all checks passed" : std::to_string(fails) + " failing row(s)") << "\n";
  return fails == 0 ? 0 : 1;
}

}  // namespace fracbound
