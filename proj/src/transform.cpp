#include "ccp/transform.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ccp {

std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::I: return "I";
    case CaseTag::II: return "II";
    case CaseTag::III: return "III";
    case CaseTag::IV: return "IV";
  }
  return "?";
}

CaseTag detect_case(const ProblemSpec& spec) {
  const bool random_c = std::holds_alternative<RandomRef>(spec.objective);
  bool any_random_row = false, any_random_rhs = false, any_joint = false;
  for (const auto& c : spec.constraints) {
    if (std::holds_alternative<RandomRef>(c.row)) any_random_row = true;
    if (std::holds_alternative<RandomScalarRef>(c.rhs)) any_random_rhs = true;
    if (std::holds_alternative<JointRandomRef>(c.rhs)) any_joint = true;
  }

  if (any_joint && random_c && !any_random_row && !any_random_rhs) return CaseTag::IV;
  if (random_c && !any_random_row && !any_random_rhs && !any_joint) return CaseTag::I;
  // Fully deterministic specs take the Case II route with zero random rows,
  // which degenerates to a plain LP.
  if (!random_c && !any_random_rhs && !any_joint) return CaseTag::II;
  if (!random_c && !any_random_row && any_random_rhs && !any_joint) return CaseTag::III;
  throw std::invalid_argument(
      "UNSUPPORTED_MIX: randomness combination outside Cases I-IV; encode it as "
      "Case IV with zero-variance sample sets");
}

Eigen::MatrixXd cov_root(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("cov_root: eigendecomposition failed");
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double floor = -1e-10 * m.norm();
  Eigen::VectorXd clamped = vals;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) < floor)
      throw std::runtime_error("cov_root: matrix is not PSD within tolerance");
    clamped(i) = std::max(vals(i), 0.0);
  }
  // L = sqrt(D) V', so ||L x||^2 = x' V D V' x = x' M x.
  return clamped.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

// Objective w = k1*mean, cone (sign-folded k2, root of S*/N).
void set_case1_objective(DeterministicProgram& prog, const ProblemSpec& spec,
                         const EstimatorBundle& est_c) {
  prog.linear_objective = spec.k1 * est_c.mean;
  const Eigen::MatrixXd var = est_c.unbiased_cov / est_c.count;
  if (spec.k2 != 0.0 && var.norm() > 0.0) {
    ConeTerm cone;
    cone.kappa = spec.sense == Sense::maximize ? -spec.k2 : spec.k2;
    cone.root = cov_root(var);
    prog.cone_objective = cone;
  }
}

Eigen::VectorXd fixed_row(const ConstraintSpec& c) {
  return std::get<FixedVector>(c.row).values;
}

double fixed_rhs(const ConstraintSpec& c) {
  return std::get<FixedScalar>(c.rhs).value;
}

double case_quantile(double alpha, int n, bool upper) {
  const TStudent dist{n - 1};
  return t_quantile(dist, upper ? 1.0 - alpha : alpha);
}

}  // namespace

DeterministicProgram build_case1(const ProblemSpec& spec, const EstimatorBundle& est_c) {
  DeterministicProgram prog;
  prog.sense = spec.sense;
  set_case1_objective(prog, spec, est_c);
  for (const auto& c : spec.constraints) {
    DeterministicProgram::Constraint out;
    out.linear = fixed_row(c);
    out.offset = -fixed_rhs(c);
    prog.constraints.push_back(std::move(out));
  }
  return prog;
}

DeterministicProgram build_case2(const ProblemSpec& spec,
                                 const std::vector<std::optional<EstimatorBundle>>& est_rows) {
  DeterministicProgram prog;
  prog.sense = spec.sense;
  prog.linear_objective = std::get<FixedVector>(spec.objective).values;
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    const auto& c = spec.constraints[i];
    DeterministicProgram::Constraint out;
    out.offset = -fixed_rhs(c);
    if (est_rows[i]) {
      const EstimatorBundle& est = *est_rows[i];
      out.linear = est.mean;
      if (est.unbiased_cov.norm() > 0.0) {
        const double eta = case_quantile(spec.alphas[i], est.count, /*upper=*/true);
        if (eta < 0.0)
          throw std::invalid_argument(
              "build_case2: alpha > 0.5 yields a negative quantile; the "
              "deterministic equivalent would not be convex");
        if (eta > 0.0) {
          ConeTerm cone;
          cone.kappa = eta / std::sqrt(static_cast<double>(est.count));
          cone.root = cov_root(est.unbiased_cov);
          out.cone = cone;
        }
      }
    } else {
      out.linear = fixed_row(c);
    }
    prog.constraints.push_back(std::move(out));
  }
  return prog;
}

DeterministicProgram build_case3(const ProblemSpec& spec, const EstimatorBundle& est_b) {
  DeterministicProgram prog;
  prog.sense = spec.sense;
  prog.linear_objective = std::get<FixedVector>(spec.objective).values;
  const double sqrt_n = std::sqrt(static_cast<double>(est_b.count));
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    const auto& c = spec.constraints[i];
    DeterministicProgram::Constraint out;
    out.linear = fixed_row(c);
    if (const auto* ref = std::get_if<RandomScalarRef>(&c.rhs)) {
      const int col = ref->column;
      const double b_bar = est_b.mean(col);
      const double s_star = std::sqrt(est_b.unbiased_cov(col, col));
      // delta_i is the alpha_i-quantile (negative for alpha < 0.5): the
      // offset tightens the constraint. Linear deterministic equivalent.
      const double delta = case_quantile(spec.alphas[i], est_b.count, /*upper=*/false);
      out.offset = -b_bar - (delta / sqrt_n) * s_star;
    } else {
      out.offset = -fixed_rhs(c);
    }
    prog.constraints.push_back(std::move(out));
  }
  return prog;
}

DeterministicProgram build_case4(const ProblemSpec& spec, const EstimatorBundle& est_c,
                                 const std::vector<std::optional<EstimatorBundle>>& est_joint) {
  DeterministicProgram prog;
  prog.sense = spec.sense;
  set_case1_objective(prog, spec, est_c);
  const int n = spec.n_vars;
  int common_n = -1;
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    if (!est_joint[i]) {
      DeterministicProgram::Constraint out;
      out.linear = fixed_row(spec.constraints[i]);
      out.offset = -fixed_rhs(spec.constraints[i]);
      prog.constraints.push_back(std::move(out));
      continue;
    }
    const EstimatorBundle& est = *est_joint[i];
    if (common_n == -1) common_n = est.count;
    if (est.count != common_n)
      throw std::invalid_argument("build_case4: joint sample sets must share a common N");
    DeterministicProgram::Constraint out;
    out.linear = est.mean.head(n);
    out.offset = -est.mean(n);  // g_bar = (a_bar', b_bar)'
    if (est.unbiased_cov.norm() > 0.0) {
      const double tau = case_quantile(spec.alphas[i], est.count, /*upper=*/true);
      if (tau < 0.0)
        throw std::invalid_argument(
            "build_case4: alpha > 0.5 yields a negative quantile; the "
            "deterministic equivalent would not be convex");
      if (tau > 0.0) {
        ConeTerm cone;
        cone.kappa = tau / std::sqrt(static_cast<double>(est.count));
        cone.root = cov_root(est.unbiased_cov);
        cone.uses_augmented = true;
        out.cone = cone;
      }
    }
    prog.constraints.push_back(std::move(out));
  }
  return prog;
}

EstimatorSet estimate_all(const ProblemSpec& spec, const SampleMap& samples,
                          const DensityGenerator* gen) {
  EstimatorSet est;
  est.rows.resize(spec.constraints.size());
  est.joint.resize(spec.constraints.size());

  const auto bundle_for = [&](const std::string& id) {
    const auto it = samples.find(id);
    if (it == samples.end())
      throw std::invalid_argument("estimate_all: unresolved sample set '" + id + "'");
    return make_bundle(it->second, gen);
  };

  if (const auto* ref = std::get_if<RandomRef>(&spec.objective))
    est.objective = bundle_for(ref->sample_id);

  std::optional<std::string> rhs_id;
  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    const auto& c = spec.constraints[i];
    if (const auto* ref = std::get_if<RandomRef>(&c.row)) est.rows[i] = bundle_for(ref->sample_id);
    if (const auto* ref = std::get_if<JointRandomRef>(&c.rhs))
      est.joint[i] = bundle_for(ref->sample_id);
    if (const auto* ref = std::get_if<RandomScalarRef>(&c.rhs)) rhs_id = ref->sample_id;
  }
  if (rhs_id) est.rhs = bundle_for(*rhs_id);
  return est;
}

DeterministicProgram build_program(const ProblemSpec& spec, const EstimatorSet& est) {
  switch (detect_case(spec)) {
    case CaseTag::I: return build_case1(spec, *est.objective);
    case CaseTag::II: return build_case2(spec, est.rows);
    case CaseTag::III: return build_case3(spec, *est.rhs);
    case CaseTag::IV: return build_case4(spec, *est.objective, est.joint);
  }
  throw std::logic_error("unreachable");
}

std::vector<std::pair<double, Solution>> pareto_sweep(const ProblemSpec& spec,
                                                      const EstimatorSet& est,
                                                      const std::vector<double>& k1_grid,
                                                      const SolverOptions& options) {
  const CaseTag tag = detect_case(spec);
  if (tag != CaseTag::I && tag != CaseTag::IV)
    throw std::invalid_argument("pareto_sweep applies to Case I or IV only");
  std::vector<std::pair<double, Solution>> out;
  for (double k1 : k1_grid) {
    if (k1 < 0.0 || k1 > 1.0)
      throw std::invalid_argument("pareto_sweep: grid values must lie in [0,1]");
    ProblemSpec point = spec;
    point.k1 = k1;
    point.k2 = 1.0 - k1;
    Solution sol;
    try {
      sol = solve(build_program(point, est), options);
    } catch (const std::exception&) {
      sol.status = SolveStatus::numerical_failure;
    }
    // Plain z = c_bar'x regardless of weights.
    if (est.objective && sol.x.size() == spec.n_vars)
      sol.z_value = est.objective->mean.dot(sol.x);
    out.emplace_back(k1, sol);
  }
  return out;
}

}  // namespace ccp
