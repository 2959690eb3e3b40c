#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace ccp {

enum class Sense { minimize, maximize };

/// An N x d matrix of i.i.d. draws for one random vector, rows = observations.
struct SampleSet {
  std::string id;
  Eigen::MatrixXd data;

  int count() const { return static_cast<int>(data.rows()); }
  int dim() const { return static_cast<int>(data.cols()); }
};

using SampleMap = std::map<std::string, SampleSet>;

struct FixedVector {
  Eigen::VectorXd values;
};

/// Reference to a whole sample set (random cost vector or constraint row).
struct RandomRef {
  std::string sample_id;
};

/// Reference to one column of a sample set (random right-hand side b_i).
struct RandomScalarRef {
  std::string sample_id;
  int column = 0;
};

/// Reference to a joint (a_i, b_i) sample set over R^{n+1}.
struct JointRandomRef {
  std::string sample_id;
};

struct FixedScalar {
  double value = 0.0;
};

struct ConstraintSpec {
  // monostate row is only valid together with a JointRandomRef rhs.
  std::variant<std::monostate, FixedVector, RandomRef> row;
  std::variant<FixedScalar, RandomScalarRef, JointRandomRef> rhs;
};

/// Declarative stochastic LP: which of c/A/b are random, fixed data,
/// risk levels and objective weights.
struct ProblemSpec {
  Sense sense = Sense::minimize;
  int n_vars = 0;
  std::variant<FixedVector, RandomRef> objective;
  std::vector<ConstraintSpec> constraints;
  double k1 = 1.0;
  double k2 = 0.0;
  std::vector<double> alphas;  // one per constraint
};

/// Second-order cone term kappa * ||L y||.
struct ConeTerm {
  double kappa = 0.0;
  Eigen::MatrixXd root;        // L
  bool uses_augmented = false; // y = (x', -1)' when true, else y = x
};

/// Canonical deterministic-equivalent IR: linear objective plus optional
/// cone objective term, constraints u'x + e + kappa*||L y|| <= 0, x >= 0.
struct DeterministicProgram {
  Sense sense = Sense::minimize;
  Eigen::VectorXd linear_objective;
  std::optional<ConeTerm> cone_objective;

  struct Constraint {
    Eigen::VectorXd linear;
    double offset = 0.0;
    std::optional<ConeTerm> cone;
  };
  std::vector<Constraint> constraints;

  int n_vars() const { return static_cast<int>(linear_objective.size()); }
  bool has_cones() const;
  /// Constraint value u'x + e + kappa*||L y|| at x (exact, unsmoothed).
  double constraint_value(int i, const Eigen::VectorXd& x) const;
  /// Objective in the problem's own sign convention.
  double objective_value(const Eigen::VectorXd& x) const;
};

enum class SolveStatus { optimal, infeasible, max_iterations, numerical_failure };

std::string to_string(SolveStatus s);

struct Solution {
  Eigen::VectorXd x;
  double z_value = 0.0;  // plain c'x
  double Z_value = 0.0;  // weighted objective where applicable
  SolveStatus status = SolveStatus::numerical_failure;
  double max_constraint_violation = 0.0;
  double kkt_residual = 0.0;
};

struct Diagnostic {
  std::string code;
  std::string message;
};

/// Pure validation: empty result iff the spec is internally consistent and
/// every sample reference resolves with matching dimensions.
std::vector<Diagnostic> validate_spec(const ProblemSpec& spec, const SampleMap& samples);

}  // namespace ccp
