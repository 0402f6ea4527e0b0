#pragma once

// Batch front end: run configurations, the corpus x check x grid sweep, and the
// result files (results.csv, results.json, manifest.json, plots/*.dat).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbound/frac_calculus.hpp"
#include "fracbound/function_model.hpp"
#include "fracbound/theorem_bench.hpp"

namespace fracbound {

inline constexpr const char* kToolVersion = "0.3.0";

/// One entry of the "checks" list. `theorem` is a check tag; the optional fields are
/// read according to it (see README for the table).
struct CheckSpec {
  std::string theorem;
  FracParams params;
  std::vector<double> sharpness;             // linf-holder: exponents r for the constant counterexample
  std::optional<double> tol;                 // explicit-constant checks
  std::vector<std::size_t> grids;            // refinement studies; empty: the study's default
  std::optional<AnalyticSpec> function;      // replaces the corpus for this entry
  bool smooth_only = false;                  // restrict the corpus to C^inf functions
  std::optional<double> bound;               // power-oracle / semigroup-bound thresholds
};

struct RunConfig {
  std::vector<AnalyticSpec> corpus;
  std::vector<CheckSpec> checks;
  std::vector<std::size_t> grids{4096};  // grid sizes for explicit-constant checks
  QuadratureScheme scheme = QuadratureScheme::productTrapezoidFFT;
  OrderConvention convention = OrderConvention::strictCeil;
  double tol = 1e-3;
  std::filesystem::path output_dir = "fracbound-out";
  bool timings = false;  // fill the seconds column (breaks byte-identical output)
};

/// Throws ConfigParseError with the path of the offending field.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// The complete acceptance suite ("--suite full").
RunConfig full_suite_config();

/// FNV-1a over the canonical JSON dump of the config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct ResultRow {
  std::string theorem;
  std::string params;
  std::string function;
  std::size_t n = 0;
  bool study = false;
  double lhs = 0.0;  // studies: value on the finest grid
  double rhs = 0.0;  // studies: fitted exponent
  double margin = 0.0;
  std::string verdict;  // pass | fail | bounded | diverging | fail:<verdict> | error
  bool pass = false;
  bool error = false;
  double tol = 0.0;
  std::string detail;
  std::vector<std::size_t> grids;
  std::vector<double> values;
  std::string expected;
  double seconds = 0.0;
};

ResultRow to_row(const TheoremCheck& c);
ResultRow to_row(const ConvergenceStudy& s);

std::string csv_header();
std::string csv_line(const ResultRow& r, bool timings);

struct RunCounts {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t error = 0;
  std::size_t skipped = 0;    // outside the theorem's hypothesis, no row written
  std::size_t diverging = 0;  // studies only
  std::size_t bounded = 0;    // studies only
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  RunCounts counts;
  std::size_t threads = 1;
  std::string status;  // complete | partialFailure
};

/// Worker count: hardware concurrency, capped by FRACBOUND_THREADS when set.
std::size_t worker_count();

/// Executes the sweep without writing files. Rows come back sorted.
std::vector<ResultRow> execute(const RunConfig& config, RunCounts& counts, std::size_t threads);

/// Executes and writes every output file into config.output_dir.
RunManifest run(const RunConfig& config);

/// Prints the per-theorem table for an output directory; returns the exit status
/// (0 iff nothing failed or errored). Throws MissingManifest.
int report(const std::filesystem::path& dir, std::ostream& out);

}  // namespace fracbound
