#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccp/model.hpp"
#include "ccp/solver.hpp"

namespace ccp {

/// Parse failure with file/line position baked into what().
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Sample file: `# id: <name>` line, a column-header line, then numeric rows.
/// Ragged rows and non-finite values are rejected with line positions.
SampleSet ingest_samples(const std::string& path);

/// Loads several sample files into a map keyed by their declared ids.
SampleMap load_sample_files(const std::vector<std::string>& paths);

/// Problem file: line-oriented `key = value`. Keys: sense, n_vars, k1, k2,
/// samples (file names relative to the spec file), objective, constraint
/// (repeatable; `row ... ; rhs ... ; alpha ...`).
/// Returns the spec plus the resolved sample-file paths it references.
std::pair<ProblemSpec, std::vector<std::string>> parse_spec_file(const std::string& path);

/// Line-oriented `key = value` document with stable ordering.
struct StructuredDoc {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);  // %.17g, round-trips doubles
  void add(const std::string& key, int value);
  const std::string* find(const std::string& key) const;
  void write(std::ostream& out) const;
  static StructuredDoc parse(std::istream& in);
};

struct RunConfig {
  std::string subcommand;  // estimate|transform|solve|pareto|validate|reproduce
  std::string spec_path;
  std::vector<std::string> sample_paths;
  std::vector<double> alphas;  // override: one value broadcast, or one per constraint
  std::optional<double> k1;
  std::uint64_t seed = 42;
  std::string format = "table";  // table|structured
  SolverOptions solver;
  std::string generator = "normal";  // coverage generator for `validate`
  int replications = 2000;
  int per_sample_n = 10;
  std::string reproduce_target;  // example1..example4
  std::string data_dir = "data/examples";
  bool pareto = false;                 // reproduce: sweep instead of single solve
  std::string warm_check_path;         // solve: prior structured report to re-check
};

/// Orchestrates the full pipeline. Exit codes: 0 success, 1 parse failure,
/// 2 validation diagnostics, 3 solver non-optimal; diagnostics go to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// FNV-1a over the canonical decimal rendering of the bundle's mean and
/// unbiased covariance; hex string used as the report's estimator checksum.
std::string estimator_checksum(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

}  // namespace ccp
