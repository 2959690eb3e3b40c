#include "ccp/io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "ccp/estimators.hpp"
#include "ccp/transform.hpp"
#include "ccp/validate.hpp"

namespace ccp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_finite(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a finite number, got '" + tok + "'");
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// File ingestion
// ---------------------------------------------------------------------------

SampleSet ingest_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  int lineno = 0;

  // Header 1: "# id: <name>"
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  ++lineno;
  const std::string h = trim(line);
  const std::string prefix = "# id:";
  if (h.rfind(prefix, 0) != 0)
    throw ParseError(path + ":1: first line must be '# id: <name>'");
  const std::string id = trim(h.substr(prefix.size()));
  if (id.empty()) throw ParseError(path + ":1: missing sample id");

  // Header 2: column names.
  if (!std::getline(in, line)) throw ParseError(path + ":2: missing column header line");
  ++lineno;
  const std::vector<std::string> cols = split_ws(line);
  if (cols.empty()) throw ParseError(path + ":2: empty column header line");
  const int d = static_cast<int>(cols.size());

  std::vector<Eigen::VectorXd> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> toks = split_ws(t);
    if (static_cast<int>(toks.size()) != d)
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                       std::to_string(toks.size()) + " values, expected " + std::to_string(d) +
                       ")");
    Eigen::VectorXd row(d);
    for (int j = 0; j < d; ++j)
      row(j) = parse_finite(toks[j],
                            path + ":" + std::to_string(lineno) + ":" + std::to_string(j + 1));
    rows.push_back(std::move(row));
  }
  SampleSet out;
  out.id = id;
  out.data.resize(static_cast<int>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) out.data.row(static_cast<int>(i)) = rows[i];
  return out;
}

SampleMap load_sample_files(const std::vector<std::string>& paths) {
  SampleMap map;
  for (const auto& p : paths) {
    SampleSet s = ingest_samples(p);
    map[s.id] = std::move(s);
  }
  return map;
}

namespace {

ConstraintSpec parse_constraint_line(const std::string& value, double& alpha,
                                     const std::string& where) {
  ConstraintSpec c;
  alpha = 0.01;
  bool have_rhs = false;
  std::stringstream parts(value);
  std::string part;
  while (std::getline(parts, part, ';')) {
    const std::vector<std::string> toks = split_ws(part);
    if (toks.empty()) continue;
    if (toks[0] == "row") {
      if (toks.size() < 2) throw ParseError(where + ": row needs a form");
      if (toks[1] == "none") {
        c.row = std::monostate{};
      } else if (toks[1] == "random") {
        if (toks.size() != 3) throw ParseError(where + ": 'row random <id>' expected");
        c.row = RandomRef{toks[2]};
      } else if (toks[1] == "fixed") {
        Eigen::VectorXd v(static_cast<int>(toks.size()) - 2);
        for (std::size_t j = 2; j < toks.size(); ++j)
          v(static_cast<int>(j) - 2) = parse_finite(toks[j], where);
        c.row = FixedVector{std::move(v)};
      } else {
        throw ParseError(where + ": unknown row form '" + toks[1] + "'");
      }
    } else if (toks[0] == "rhs") {
      have_rhs = true;
      if (toks.size() < 2) throw ParseError(where + ": rhs needs a form");
      if (toks[1] == "fixed") {
        if (toks.size() != 3) throw ParseError(where + ": 'rhs fixed <value>' expected");
        c.rhs = FixedScalar{parse_finite(toks[2], where)};
      } else if (toks[1] == "random") {
        if (toks.size() != 4) throw ParseError(where + ": 'rhs random <id> <column>' expected");
        c.rhs = RandomScalarRef{toks[2], static_cast<int>(parse_finite(toks[3], where))};
      } else if (toks[1] == "joint") {
        if (toks.size() != 3) throw ParseError(where + ": 'rhs joint <id>' expected");
        c.rhs = JointRandomRef{toks[2]};
      } else {
        throw ParseError(where + ": unknown rhs form '" + toks[1] + "'");
      }
    } else if (toks[0] == "alpha") {
      if (toks.size() != 2) throw ParseError(where + ": 'alpha <value>' expected");
      alpha = parse_finite(toks[1], where);
    } else {
      throw ParseError(where + ": unknown constraint field '" + toks[0] + "'");
    }
  }
  if (!have_rhs) throw ParseError(where + ": constraint is missing its rhs");
  return c;
}

}  // namespace

std::pair<ProblemSpec, std::vector<std::string>> parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  ProblemSpec spec;
  spec.n_vars = 0;
  std::vector<std::string> sample_files;
  bool have_objective = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    if (key == "sense") {
      if (value == "maximize")
        spec.sense = Sense::maximize;
      else if (value == "minimize")
        spec.sense = Sense::minimize;
      else
        throw ParseError(where + ": sense must be 'maximize' or 'minimize'");
    } else if (key == "n_vars") {
      spec.n_vars = static_cast<int>(parse_finite(value, where));
    } else if (key == "k1") {
      spec.k1 = parse_finite(value, where);
    } else if (key == "k2") {
      spec.k2 = parse_finite(value, where);
    } else if (key == "samples") {
      for (const auto& f : split_ws(value)) sample_files.push_back((base / f).string());
    } else if (key == "objective") {
      const std::vector<std::string> toks = split_ws(value);
      if (toks.empty()) throw ParseError(where + ": objective needs a form");
      if (toks[0] == "random") {
        if (toks.size() != 2) throw ParseError(where + ": 'objective = random <id>' expected");
        spec.objective = RandomRef{toks[1]};
      } else if (toks[0] == "fixed") {
        Eigen::VectorXd v(static_cast<int>(toks.size()) - 1);
        for (std::size_t j = 1; j < toks.size(); ++j)
          v(static_cast<int>(j) - 1) = parse_finite(toks[j], where);
        spec.objective = FixedVector{std::move(v)};
      } else {
        throw ParseError(where + ": unknown objective form '" + toks[0] + "'");
      }
      have_objective = true;
    } else if (key == "constraint") {
      double alpha = 0.01;
      spec.constraints.push_back(parse_constraint_line(value, alpha, where));
      spec.alphas.push_back(alpha);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  if (!have_objective) throw ParseError(path + ": no objective line");
  if (spec.n_vars <= 0) throw ParseError(path + ": n_vars must be set to a positive integer");
  return {spec, sample_files};
}

// ---------------------------------------------------------------------------
// Structured documents
// ---------------------------------------------------------------------------

void StructuredDoc::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}
void StructuredDoc::add(const std::string& key, double value) { entries.emplace_back(key, fmt(value)); }
void StructuredDoc::add(const std::string& key, int value) {
  entries.emplace_back(key, std::to_string(value));
}

const std::string* StructuredDoc::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

void StructuredDoc::write(std::ostream& out) const {
  for (const auto& [k, v] : entries) out << k << " = " << v << "\n";
}

StructuredDoc StructuredDoc::parse(std::istream& in) {
  StructuredDoc doc;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("structured input: expected 'key = value'");
    doc.entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return doc;
}

std::string estimator_checksum(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (int i = 0; i < mean.size(); ++i) mix(fmt(mean(i)) + ",");
  for (int i = 0; i < cov.rows(); ++i)
    for (int j = 0; j < cov.cols(); ++j) mix(fmt(cov(i, j)) + ";");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> shipped_generators() {
  return {"normal", "pearson7(5)", "power_exponential(1)"};
}

struct Pipeline {
  ProblemSpec spec;
  SampleMap samples;
  EstimatorSet est;
  CaseTag tag = CaseTag::I;
};

Pipeline load_pipeline(const RunConfig& config, const std::string& spec_path) {
  Pipeline p;
  auto [spec, files] = parse_spec_file(spec_path);
  for (const auto& extra : config.sample_paths) files.push_back(extra);
  p.spec = std::move(spec);
  p.samples = load_sample_files(files);
  if (!config.alphas.empty()) {
    if (config.alphas.size() == 1)
      p.spec.alphas.assign(p.spec.constraints.size(), config.alphas[0]);
    else if (config.alphas.size() == p.spec.constraints.size())
      p.spec.alphas = config.alphas;
    else
      throw ParseError("--alpha: expected 1 value or one per constraint");
  }
  if (config.k1) {
    p.spec.k1 = *config.k1;
    p.spec.k2 = 1.0 - *config.k1;
  }
  return p;
}

/// Plain z = c_bar'x (or c'x when the objective is fixed).
double plain_z(const Pipeline& p, const Eigen::VectorXd& x) {
  if (p.est.objective) return p.est.objective->mean.dot(x);
  return std::get<FixedVector>(p.spec.objective).values.dot(x);
}

void add_provenance(StructuredDoc& doc, const RunConfig& config, const Pipeline& p) {
  doc.add("run.subcommand", config.subcommand);
  doc.add("run.case", to_string(p.tag));
  doc.add("run.seed", fmt(static_cast<double>(config.seed)));
  for (std::size_t i = 0; i < p.spec.constraints.size(); ++i) {
    const EstimatorBundle* b = nullptr;
    bool upper = true;
    if (p.tag == CaseTag::II && p.est.rows[i]) b = &*p.est.rows[i];
    if (p.tag == CaseTag::IV && p.est.joint[i]) b = &*p.est.joint[i];
    if (p.tag == CaseTag::III &&
        std::holds_alternative<RandomScalarRef>(p.spec.constraints[i].rhs)) {
      b = &*p.est.rhs;
      upper = false;
    }
    if (b != nullptr) {
      const double q = t_quantile(TStudent{b->count - 1},
                                  upper ? 1.0 - p.spec.alphas[i] : p.spec.alphas[i]);
      doc.add("quantile." + std::to_string(i), q);
    }
  }
  for (const auto& [id, s] : p.samples) {
    const EstimatorBundle b = make_bundle(s);
    doc.add("estimator." + id + ".n", b.count);
    doc.add("estimator." + id + ".checksum", estimator_checksum(b.mean, b.unbiased_cov));
  }
  doc.add("run.timestamp", iso_timestamp());
}

void add_solution(StructuredDoc& doc, const Solution& sol, double z) {
  doc.add("solution.status", to_string(sol.status));
  for (int j = 0; j < sol.x.size(); ++j) doc.add("solution.x." + std::to_string(j), sol.x(j));
  doc.add("solution.Z_max", sol.Z_value);
  doc.add("solution.z_max", z);
  doc.add("solution.max_violation", sol.max_constraint_violation);
  doc.add("solution.kkt_residual", sol.kkt_residual);
}

void print_solution_table(std::ostream& out, const Pipeline& p, const Solution& sol, double z) {
  out << "case       " << to_string(p.tag) << "\n";
  out << "variable   value\n";
  for (int j = 0; j < sol.x.size(); ++j)
    out << "x" << (j + 1) << "         " << fmt_fixed(sol.x(j), 5) << "\n";
  out << "Z_max      " << fmt_fixed(sol.Z_value, 4) << "\n";
  out << "z_max      " << fmt_fixed(z, 4) << "\n";
  out << "status     " << to_string(sol.status) << "\n";
}

int emit_solve(const RunConfig& config, Pipeline& p, std::ostream& out, std::ostream& err) {
  const DeterministicProgram program = build_program(p.spec, p.est);
  Solution sol;
  if (!config.warm_check_path.empty()) {
    std::ifstream prior(config.warm_check_path);
    if (!prior) throw ParseError(config.warm_check_path + ": cannot open file");
    const StructuredDoc doc = StructuredDoc::parse(prior);
    Eigen::VectorXd x(p.spec.n_vars);
    for (int j = 0; j < p.spec.n_vars; ++j) {
      const std::string* v = doc.find("solution.x." + std::to_string(j));
      if (v == nullptr) throw ParseError("warm check: missing solution.x." + std::to_string(j));
      x(j) = parse_finite(*v, config.warm_check_path);
    }
    sol.x = x;
    sol.Z_value = program.objective_value(x);
    sol.z_value = plain_z(p, x);
    const auto [feas, stat] = check_kkt(program, x);
    sol.max_constraint_violation = feas;
    sol.kkt_residual = stat;
    sol.status = (feas <= config.solver.feasibility_tol && stat <= config.solver.kkt_tol)
                     ? SolveStatus::optimal
                     : SolveStatus::numerical_failure;
  } else {
    sol = solve(program, config.solver);
  }
  const double z = sol.x.size() == p.spec.n_vars ? plain_z(p, sol.x) : 0.0;

  if (config.format == "structured") {
    StructuredDoc doc;
    add_provenance(doc, config, p);
    add_solution(doc, sol, z);
    doc.write(out);
  } else {
    print_solution_table(out, p, sol, z);
  }
  if (sol.status != SolveStatus::optimal) {
    err << "solver did not reach an optimum: " << to_string(sol.status) << "\n";
    return 3;
  }
  return 0;
}

int emit_pareto(const RunConfig& config, Pipeline& p, const std::vector<double>& grid,
                std::ostream& out, std::ostream& err) {
  const auto sweep = pareto_sweep(p.spec, p.est, grid, config.solver);
  bool all_ok = true;
  if (config.format == "structured") {
    StructuredDoc doc;
    add_provenance(doc, config, p);
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      const auto& [k1, sol] = sweep[k];
      const std::string pre = "pareto." + std::to_string(k) + ".";
      doc.add(pre + "k1", k1);
      doc.add(pre + "status", to_string(sol.status));
      doc.add(pre + "Z_max", sol.Z_value);
      doc.add(pre + "z_max", sol.z_value);
      for (int j = 0; j < sol.x.size(); ++j)
        doc.add(pre + "x." + std::to_string(j), sol.x(j));
      all_ok = all_ok && sol.status == SolveStatus::optimal;
    }
    doc.write(out);
  } else {
    out << "case       " << to_string(p.tag) << "\n";
    out << "k1         Z_max          z_max          status\n";
    for (const auto& [k1, sol] : sweep) {
      out << fmt_fixed(k1, 2) << "       " << fmt_fixed(sol.Z_value, 4) << "      "
          << fmt_fixed(sol.z_value, 4) << "      " << to_string(sol.status) << "\n";
      all_ok = all_ok && sol.status == SolveStatus::optimal;
    }
  }
  if (!all_ok) {
    err << "one or more grid points did not reach an optimum\n";
    return 3;
  }
  return 0;
}

int emit_estimate(const RunConfig& config, Pipeline& p, std::ostream& out) {
  const DensityGenerator gen = registry_get(config.generator);
  if (config.format == "structured") {
    StructuredDoc doc;
    doc.add("run.subcommand", config.subcommand);
    for (const auto& [id, s] : p.samples) {
      const EstimatorBundle b = make_bundle(s, &gen);
      const std::string pre = "estimator." + id + ".";
      doc.add(pre + "n", b.count);
      for (int j = 0; j < b.mean.size(); ++j)
        doc.add(pre + "mean." + std::to_string(j), b.mean(j));
      for (int i = 0; i < b.unbiased_cov.rows(); ++i)
        for (int j = 0; j < b.unbiased_cov.cols(); ++j)
          doc.add(pre + "cov." + std::to_string(i) + "." + std::to_string(j),
                  b.unbiased_cov(i, j));
      if (b.mle_cov)
        for (int i = 0; i < b.mle_cov->rows(); ++i)
          for (int j = 0; j < b.mle_cov->cols(); ++j)
            doc.add(pre + "mle_cov." + std::to_string(i) + "." + std::to_string(j),
                    (*b.mle_cov)(i, j));
      doc.add(pre + "checksum", estimator_checksum(b.mean, b.unbiased_cov));
    }
    doc.add("run.timestamp", iso_timestamp());
    doc.write(out);
  } else {
    for (const auto& [id, s] : p.samples) {
      const EstimatorBundle b = make_bundle(s, &gen);
      out << "sample " << id << "  n=" << b.count << "\n";
      out << "  mean:";
      for (int j = 0; j < b.mean.size(); ++j) out << " " << fmt_fixed(b.mean(j), 6);
      out << "\n  unbiased covariance diagonal:";
      for (int j = 0; j < b.unbiased_cov.rows(); ++j)
        out << " " << fmt_fixed(b.unbiased_cov(j, j), 6);
      out << "\n";
    }
  }
  return 0;
}

int emit_transform(const RunConfig& config, Pipeline& p, std::ostream& out) {
  const DeterministicProgram program = build_program(p.spec, p.est);
  StructuredDoc doc;
  doc.add("program.sense", program.sense == Sense::maximize ? "maximize" : "minimize");
  doc.add("program.case", to_string(p.tag));
  for (int j = 0; j < program.linear_objective.size(); ++j)
    doc.add("program.objective." + std::to_string(j), program.linear_objective(j));
  if (program.cone_objective) doc.add("program.objective.kappa", program.cone_objective->kappa);
  for (std::size_t i = 0; i < program.constraints.size(); ++i) {
    const auto& c = program.constraints[i];
    const std::string pre = "program.constraint." + std::to_string(i) + ".";
    for (int j = 0; j < c.linear.size(); ++j)
      doc.add(pre + "linear." + std::to_string(j), c.linear(j));
    doc.add(pre + "offset", c.offset);
    if (c.cone) doc.add(pre + "kappa", c.cone->kappa);
  }
  if (config.format == "structured") {
    StructuredDoc full;
    add_provenance(full, config, p);
    full.entries.insert(full.entries.end(), doc.entries.begin(), doc.entries.end());
    full.write(out);
  } else {
    doc.write(out);
  }
  return 0;
}

int emit_validate(const RunConfig& config, Pipeline* p, std::ostream& out, std::ostream& err) {
  const auto reports =
      invariance_test(shipped_generators(), config.per_sample_n, config.replications, config.seed);
  StructuredDoc doc;
  bool all_pass = true;
  for (const auto& r : reports) {
    const std::string pre = "invariance." + r.generator_id + ".";
    doc.add(pre + "ks", r.ks_statistic);
    doc.add(pre + "critical", r.critical_value);
    doc.add(pre + "pass", r.pass ? "true" : "false");
    all_pass = all_pass && r.pass;
  }
  if (p != nullptr) {
    const DeterministicProgram program = build_program(p->spec, p->est);
    const Solution sol = solve(program, config.solver);
    if (sol.status != SolveStatus::optimal) {
      err << "solver did not reach an optimum: " << to_string(sol.status) << "\n";
      return 3;
    }
    const CoverageReport cov = coverage_test(p->spec, p->est, sol.x, config.generator,
                                             config.replications, config.seed);
    for (const auto& cc : cov.constraints) {
      const std::string pre =
          "coverage." + cov.generator_id + "." + std::to_string(cc.index) + ".";
      doc.add(pre + "rate", cc.rate);
      doc.add(pre + "nominal", cc.nominal);
      doc.add(pre + "wilson_low", cc.wilson_low);
      doc.add(pre + "wilson_high", cc.wilson_high);
      doc.add(pre + "pass", cc.pass ? "true" : "false");
      all_pass = all_pass && cc.pass;
    }
  }
  if (config.format == "structured") {
    doc.add("run.timestamp", iso_timestamp());
    doc.write(out);
  } else {
    for (const auto& [k, v] : doc.entries) out << k << "  " << v << "\n";
  }
  if (!all_pass) err << "one or more validation checks failed\n";
  return 0;
}

int run_reproduce(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::string& target = config.reproduce_target;
  static const std::set<std::string> known = {"example1", "example2", "example3", "example4"};
  if (known.count(target) == 0)
    throw ParseError("reproduce: unknown target '" + target + "' (example1..example4)");
  RunConfig sub = config;
  sub.subcommand = "solve";
  const std::string spec_path =
      (std::filesystem::path(config.data_dir) / (target + ".spec")).string();
  Pipeline p = load_pipeline(sub, spec_path);

  const auto diags = validate_spec(p.spec, p.samples);
  if (!diags.empty()) {
    for (const auto& d : diags) err << d.code << ": " << d.message << "\n";
    return 2;
  }
  p.est = estimate_all(p.spec, p.samples);
  p.tag = detect_case(p.spec);

  if (config.pareto) {
    std::vector<double> grid;
    if (target == "example1")
      grid = {0.1, 0.5, 0.9};
    else if (target == "example4")
      grid = {0.25, 0.5, 0.75};
    else
      throw ParseError("reproduce --pareto applies to example1 and example4 only");
    sub.subcommand = "pareto";
    return emit_pareto(sub, p, grid, out, err);
  }
  return emit_solve(sub, p, out, err);
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == "reproduce") return run_reproduce(config, out, err);

    if (config.subcommand == "validate" && config.spec_path.empty()) {
      return emit_validate(config, nullptr, out, err);
    }

    Pipeline p = load_pipeline(config, config.spec_path);
    const auto diags = validate_spec(p.spec, p.samples);
    if (!diags.empty()) {
      for (const auto& d : diags) err << d.code << ": " << d.message << "\n";
      return 2;
    }
    if (config.subcommand == "estimate") return emit_estimate(config, p, out);
    p.est = estimate_all(p.spec, p.samples);
    p.tag = detect_case(p.spec);

    if (config.subcommand == "transform") return emit_transform(config, p, out);
    if (config.subcommand == "solve") return emit_solve(config, p, out, err);
    if (config.subcommand == "pareto") {
      std::vector<double> grid;
      for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
      return emit_pareto(config, p, grid, out, err);
    }
    if (config.subcommand == "validate") return emit_validate(config, &p, out, err);
    throw ParseError("unknown subcommand '" + config.subcommand + "'");
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

}  // namespace ccp
