// fracbound: command-line front end.
//
//   fracbound apply  --function SPEC --alpha A [--derivative] [--n N] [--scheme naive|fft] [--out FILE]
//   fracbound norm   --function SPEC --space NAME [--p P] [--gamma G] [--order K] [--alpha A] [--n N]
//   fracbound verify --theorem TAG [--alpha A] [--p P] [--gamma G] [--q Q] [--order K] [--function SPEC] [--out DIR]
//   fracbound suite  [--config FILE] [--n N] [--scheme naive|fft] [--out DIR] [--timings]
//   fracbound report --out DIR
//
// SPEC is inline JSON ({"kind": "power", "gamma": 0.5}) or the path of a JSON file.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracbound/cli_report.hpp"
#include "fracbound/errors.hpp"
#include "fracbound/format.hpp"
#include "fracbound/frac_calculus.hpp"
#include "fracbound/space_norms.hpp"
#include "fracbound/spec_json.hpp"

using namespace fracbound;
using nlohmann::json;

namespace {

AnalyticSpec read_spec(const std::string& arg) {
  std::string body = arg;
  if (arg.empty() || arg.front() != '{') {
    std::ifstream in(arg);
    if (!in) throw ConfigParseError("--function: '" + arg + "' is neither inline JSON nor a readable file");
    std::stringstream buf;
    buf << in.rdbuf();
    body = buf.str();
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(std::string("--function: malformed JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("function")) j = j["function"];
  return spec_from_json(j, "function");
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "Infinity") return INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw InvalidArgument("--p: '" + s + "' is not a number");
  return v;
}

struct Common {
  std::size_t n = 0;
  std::string scheme;
  std::string out;
  std::string config;
  double alpha = NAN;
  std::string p;
};

int cmd_apply(const Common& c, const std::string& fn, bool derivative) {
  const auto spec = read_spec(fn);
  if (std::isnan(c.alpha)) throw InvalidArgument("apply needs --alpha");
  const auto scheme = c.scheme.empty() ? QuadratureScheme::productTrapezoidFFT : scheme_from_string(c.scheme);
  const auto f = sample(spec, c.n ? c.n : 1024);
  const auto g = derivative ? rl_derivative(f, c.alpha, scheme) : rl_integral(f, c.alpha, scheme);

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw InvalidArgument("cannot write " + c.out);
  }
  std::ostream& out = c.out.empty() ? std::cout : file;
  const std::string op = derivative ? "D" : "J";
  out << "t";
  for (std::size_t k = 0; k < f.dimension(); ++k) out << ",f" << k;
  for (std::size_t k = 0; k < g.dimension(); ++k) out << "," << op << k;
  out << "\n";
  for (std::size_t i = 0; i <= f.intervals(); ++i) {
    out << exact_num(f.node(i));
    for (double v : f.at(i)) out << "," << exact_num(v);
    for (double v : g.at(i)) out << "," << exact_num(v);
    out << "\n";
  }
  return 0;
}

int cmd_norm(const Common& c, const std::string& fn, const std::string& space, std::optional<double> gamma,
             std::optional<int> order) {
  const auto spec = read_spec(fn);
  const auto scheme = c.scheme.empty() ? QuadratureScheme::productTrapezoidFFT : scheme_from_string(c.scheme);
  auto f = sample(spec, c.n ? c.n : 1024);
  if (!std::isnan(c.alpha)) f = rl_integral(f, c.alpha, scheme);
  const double p = c.p.empty() ? 2.0 : parse_p(c.p);
  auto need_gamma = [&] {
    if (!gamma) throw InvalidArgument("space '" + space + "' needs --gamma");
    return *gamma;
  };
  NormReport r;
  if (space == "lp")
    r = lp_norm(f, p);
  else if (space == "weak-lp")
    r = weak_lp_seminorm(f, p);
  else if (space == "holder")
    r = holder_seminorm(f, order.value_or(0), need_gamma());
  else if (space == "sobolev")
    r = sobolev_norm(f, order.value_or(1), p);
  else if (space == "bmo")
    r = bmo_seminorm(f);
  else if (space == "kr")
    r = kr_norm(f, need_gamma());
  else if (space == "wrl")
    r = wrl_norm(f, need_gamma(), OrderConvention::strictCeil, scheme);
  else if (space == "bk")
    r = bk_norm(f, order.value_or(1), p, need_gamma());
  else
    throw InvalidArgument("unknown space '" + space + "' (lp, weak-lp, holder, sobolev, bmo, kr, wrl, bk)");
  std::cout << NormReport::csv_header() << "\n" << r.csv_row() << "\n";
  if (!r.method.empty()) std::cerr << "method: " << r.method << "\n";
  return 0;
}

void apply_overrides(RunConfig& cfg, const Common& c, bool timings) {
  if (c.n) cfg.grids = {c.n};
  if (!c.scheme.empty()) cfg.scheme = scheme_from_string(c.scheme);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (timings) cfg.timings = true;
}

int cmd_verify(const Common& c, const std::string& theorem, const std::string& fn, std::optional<double> gamma,
               std::optional<double> q, std::optional<double> beta, std::optional<int> order,
               std::optional<double> tol) {
  json entry = {{"theorem", theorem}};
  if (!std::isnan(c.alpha)) entry["alpha"] = c.alpha;
  if (!c.p.empty()) entry["p"] = c.p == "inf" ? json("inf") : json(parse_p(c.p));
  if (gamma) entry["gamma"] = *gamma;
  if (q) entry["q"] = *q;
  if (beta) entry["beta"] = *beta;
  if (order) entry["n"] = *order;
  if (tol) entry["tol"] = *tol;
  json j = {{"checks", json::array({entry})}};
  auto cfg = c.config.empty() ? config_from_json(j) : load_config(c.config);
  if (!c.config.empty()) cfg.checks = config_from_json(j).checks;
  if (!fn.empty()) cfg.checks[0].function = read_spec(fn);
  apply_overrides(cfg, c, false);

  if (!c.out.empty()) {
    const auto m = run(cfg);
    std::cout << "wrote " << cfg.output_dir.string() << " (" << m.counts.pass << " pass, " << m.counts.fail
              << " fail, " << m.counts.error << " error, " << m.counts.skipped << " skipped)\n";
    return m.counts.fail + m.counts.error == 0 ? 0 : 1;
  }
  RunCounts counts;
  const auto rows = execute(cfg, counts, worker_count());
  std::cout << csv_header() << "\n";
  for (const auto& r : rows) std::cout << csv_line(r, false) << "\n";
  for (const auto& r : rows)
    if (!r.detail.empty()) std::cerr << r.theorem << " " << r.function << ": " << r.detail << "\n";
  if (rows.empty() && counts.skipped > 0) {
    std::cerr << "every case lies outside the theorem's hypothesis (" << counts.skipped << " skipped)\n";
    return 4;
  }
  return counts.fail + counts.error == 0 ? 0 : 1;
}

int cmd_suite(const Common& c, bool timings) {
  auto cfg = c.config.empty() ? full_suite_config() : load_config(c.config);
  apply_overrides(cfg, c, timings);
  const auto m = run(cfg);
  std::cout << "results in " << cfg.output_dir.string() << "  (config " << m.config_hash << ", " << m.threads
            << " worker(s))\n";
  std::cout << m.counts.pass << " pass, " << m.counts.fail << " fail, " << m.counts.error << " error, "
            << m.counts.skipped << " skipped; studies: " << m.counts.bounded << " bounded, " << m.counts.diverging
            << " diverging\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemann-Liouville fractional integral bounds: quadrature, norms and theorem checks"};
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "grid intervals");
    sub->add_option("--scheme", c.scheme, "quadrature: naive or fft")->check(CLI::IsMember({"naive", "fft"}));
    sub->add_option("--out", c.out, "output file or directory");
    sub->add_option("--config", c.config, "run configuration (JSON)");
    sub->add_option("--alpha", c.alpha, "order alpha");
    sub->add_option("--p", c.p, "exponent p (number or inf)");
  };

  std::string fn, space, theorem;
  bool derivative = false, timings = false;
  std::optional<double> gamma, q, beta, tol;
  std::optional<int> order;

  auto* apply = app.add_subcommand("apply", "sample a function and apply J^alpha (or D^alpha)");
  add_common(apply);
  apply->add_option("--function", fn, "function spec (inline JSON or file)")->required();
  apply->add_flag("--derivative", derivative, "apply D^alpha instead of J^alpha");

  auto* norm = app.add_subcommand("norm", "one norm or seminorm of f (or of J^alpha f with --alpha)");
  add_common(norm);
  norm->add_option("--function", fn, "function spec (inline JSON or file)")->required();
  norm->add_option("--space", space, "lp, weak-lp, holder, sobolev, bmo, kr, wrl, bk")->required();
  norm->add_option("--gamma", gamma, "space parameter: Hoelder exponent, KR/BK gamma, W_RL order");
  norm->add_option("--order", order, "derivative order for holder, sobolev, bk");

  auto* verify = app.add_subcommand("verify", "run one theorem check over the corpus or one function");
  add_common(verify);
  verify->add_option("--theorem", theorem, "check tag, e.g. supercritical-continuity")->required();
  verify->add_option("--function", fn, "restrict to one function spec");
  verify->add_option("--gamma", gamma, "gamma parameter");
  verify->add_option("--q", q, "q / r parameter");
  verify->add_option("--beta", beta, "second order (semigroup)");
  verify->add_option("--order", order, "integer n (critical-bk)");
  verify->add_option("--tol", tol, "relative slack for explicit constants");

  auto* suite = app.add_subcommand("suite", "run a configuration (default: the full suite) and write results");
  add_common(suite);
  suite->add_flag("--timings", timings, "fill the seconds column");

  auto* rep = app.add_subcommand("report", "summarize an output directory; exit 0 iff everything passed");
  std::string dir;
  rep->add_option("dir", dir, "output directory");
  rep->add_option("--out", c.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (apply->parsed()) return cmd_apply(c, fn, derivative);
    if (norm->parsed()) return cmd_norm(c, fn, space, gamma, order);
    if (verify->parsed()) return cmd_verify(c, theorem, fn, gamma, q, beta, order, tol);
    if (suite->parsed()) return cmd_suite(c, timings);
    if (rep->parsed()) {
      const std::string d = !dir.empty() ? dir : (!c.out.empty() ? c.out : "fracbound-out");
      return report(d, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "fracbound: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fracbound: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
