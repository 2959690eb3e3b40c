#include "ccp/model.hpp"

#include <cmath>
#include <sstream>

namespace ccp {

namespace {

Eigen::VectorXd augmented(const Eigen::VectorXd& x) {
  Eigen::VectorXd y(x.size() + 1);
  y.head(x.size()) = x;
  y(x.size()) = -1.0;
  return y;
}

double cone_value(const ConeTerm& cone, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = cone.uses_augmented ? augmented(x) : x;
  return cone.kappa * (cone.root * y).norm();
}

}  // namespace

bool DeterministicProgram::has_cones() const {
  if (cone_objective && cone_objective->kappa != 0.0) return true;
  for (const auto& c : constraints)
    if (c.cone && c.cone->kappa != 0.0) return true;
  return false;
}

double DeterministicProgram::constraint_value(int i, const Eigen::VectorXd& x) const {
  const auto& c = constraints.at(i);
  double v = c.linear.dot(x) + c.offset;
  if (c.cone) v += cone_value(*c.cone, x);
  return v;
}

double DeterministicProgram::objective_value(const Eigen::VectorXd& x) const {
  double v = linear_objective.dot(x);
  if (cone_objective) v += cone_value(*cone_objective, x);
  return v;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

void add(std::vector<Diagnostic>& out, const std::string& code, const std::string& msg) {
  out.push_back({code, msg});
}

const SampleSet* find_sample(const SampleMap& samples, const std::string& id) {
  const auto it = samples.find(id);
  return it == samples.end() ? nullptr : &it->second;
}

// Checks resolution, dimension, finiteness and minimum size of one reference.
void check_sample_ref(std::vector<Diagnostic>& out, const SampleMap& samples,
                      const std::string& id, int expected_dim, const std::string& slot) {
  const SampleSet* s = find_sample(samples, id);
  if (s == nullptr) {
    add(out, "UNRESOLVED_SAMPLE_REF", slot + " references unknown sample set '" + id + "'");
    return;
  }
  if (expected_dim > 0 && s->dim() != expected_dim) {
    std::ostringstream msg;
    msg << slot << ": sample set '" << id << "' has dimension " << s->dim()
        << ", expected " << expected_dim;
    add(out, "DIMENSION_MISMATCH", msg.str());
  }
  if (s->count() < 2)
    add(out, "SAMPLE_TOO_SMALL", slot + ": sample set '" + id + "' has fewer than 2 rows");
  if (!s->data.allFinite())
    add(out, "NONFINITE_SAMPLE", slot + ": sample set '" + id + "' contains non-finite entries");
}

}  // namespace

std::vector<Diagnostic> validate_spec(const ProblemSpec& spec, const SampleMap& samples) {
  std::vector<Diagnostic> out;
  const int n = spec.n_vars;

  if (n <= 0) add(out, "NVARS_NOT_POSITIVE", "n_vars must be a positive integer");

  if (spec.k1 < 0.0 || spec.k2 < 0.0 || std::abs(spec.k1 + spec.k2 - 1.0) > 1e-12)
    add(out, "WEIGHTS_NOT_CONVEX", "k1, k2 must be nonnegative with k1 + k2 = 1");

  if (spec.alphas.size() != spec.constraints.size())
    add(out, "ALPHA_COUNT_MISMATCH", "one alpha per constraint is required");
  for (std::size_t i = 0; i < spec.alphas.size(); ++i) {
    if (!(spec.alphas[i] > 0.0 && spec.alphas[i] < 1.0)) {
      std::ostringstream msg;
      msg << "alpha_" << (i + 1) << " = " << spec.alphas[i] << " is outside (0,1)";
      add(out, "ALPHA_OUT_OF_RANGE", msg.str());
    }
  }

  if (const auto* fixed = std::get_if<FixedVector>(&spec.objective)) {
    if (n > 0 && fixed->values.size() != n)
      add(out, "OBJECTIVE_DIM_MISMATCH", "fixed objective length does not match n_vars");
  } else {
    check_sample_ref(out, samples, std::get<RandomRef>(spec.objective).sample_id, n,
                     "objective");
  }

  for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
    const auto& c = spec.constraints[i];
    const std::string slot = "constraint " + std::to_string(i + 1);
    const bool joint = std::holds_alternative<JointRandomRef>(c.rhs);

    if (joint) {
      if (!std::holds_alternative<std::monostate>(c.row))
        add(out, "JOINT_CONFLICT",
            slot + ": joint (a_i, b_i) reference excludes a separate row specification");
      check_sample_ref(out, samples, std::get<JointRandomRef>(c.rhs).sample_id, n + 1, slot);
      continue;
    }

    if (const auto* fixed = std::get_if<FixedVector>(&c.row)) {
      if (n > 0 && fixed->values.size() != n)
        add(out, "DIMENSION_MISMATCH", slot + ": fixed row length does not match n_vars");
    } else if (const auto* ref = std::get_if<RandomRef>(&c.row)) {
      check_sample_ref(out, samples, ref->sample_id, n, slot);
    } else {
      add(out, "MISSING_ROW", slot + ": a row is required unless the constraint is joint");
    }

    if (const auto* ref = std::get_if<RandomScalarRef>(&c.rhs)) {
      check_sample_ref(out, samples, ref->sample_id, 0, slot + " rhs");
      if (const SampleSet* s = find_sample(samples, ref->sample_id)) {
        if (ref->column < 0 || ref->column >= s->dim())
          add(out, "RHS_COLUMN_OUT_OF_RANGE",
              slot + ": rhs column index is outside sample set '" + ref->sample_id + "'");
      }
    }
  }

  return out;
}

}  // namespace ccp
