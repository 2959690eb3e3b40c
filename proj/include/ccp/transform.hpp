#pragma once

#include <optional>
#include <vector>

#include "ccp/estimators.hpp"
#include "ccp/model.hpp"
#include "ccp/solver.hpp"

namespace ccp {

enum class CaseTag { I, II, III, IV };

std::string to_string(CaseTag tag);

/// Pure function of which spec slots are random. Mixed configurations outside
/// the four supported cases throw std::invalid_argument (UNSUPPORTED_MIX);
/// encode them as Case IV with zero-variance samples instead.
CaseTag detect_case(const ProblemSpec& spec);

/// All estimator bundles a transform can need, aligned with the spec.
struct EstimatorSet {
  std::optional<EstimatorBundle> objective;            // c
  std::vector<std::optional<EstimatorBundle>> rows;    // a_i, per constraint
  std::optional<EstimatorBundle> rhs;                  // b (over R^m)
  std::vector<std::optional<EstimatorBundle>> joint;   // g_i = (a_i, b_i), per constraint
};

/// Computes every bundle referenced by the spec.
EstimatorSet estimate_all(const ProblemSpec& spec, const SampleMap& samples,
                          const DensityGenerator* gen = nullptr);

DeterministicProgram build_case1(const ProblemSpec& spec, const EstimatorBundle& est_c);
DeterministicProgram build_case2(const ProblemSpec& spec,
                                 const std::vector<std::optional<EstimatorBundle>>& est_rows);
DeterministicProgram build_case3(const ProblemSpec& spec, const EstimatorBundle& est_b);
DeterministicProgram build_case4(const ProblemSpec& spec, const EstimatorBundle& est_c,
                                 const std::vector<std::optional<EstimatorBundle>>& est_joint);

/// Detects the case and dispatches to the matching builder.
DeterministicProgram build_program(const ProblemSpec& spec, const EstimatorSet& est);

/// Re-solves with (k1, 1 - k1) per grid point; Case I or IV only. Solver
/// errors are recorded per point and the sweep continues.
std::vector<std::pair<double, Solution>> pareto_sweep(const ProblemSpec& spec,
                                                      const EstimatorSet& est,
                                                      const std::vector<double>& k1_grid,
                                                      const SolverOptions& options = {});

/// Root L of a PSD matrix with ||L x||^2 = x' M x. Eigenvalues below
/// -1e-10 * ||M|| are rejected, smaller negatives clamped to zero.
Eigen::MatrixXd cov_root(const Eigen::MatrixXd& m);

}  // namespace ccp
