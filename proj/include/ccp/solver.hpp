#pragma once

#include <cstdint>
#include <utility>

#include "ccp/model.hpp"

namespace ccp {

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double kkt_tol = 1e-6;
  int max_iterations = 10000;
  double cone_smoothing_eps = 1e-9;
};

/// Solves the deterministic IR with x >= 0. Cone-free programs go through the
/// pivoting (simplex) path; cone-bearing programs through a barrier method on
/// the smoothed cones. Residuals in the Solution are exact (unsmoothed).
Solution solve(const DeterministicProgram& program, const SolverOptions& options = {});

/// (feasibility residual, stationarity residual) at x, from exact subgradients.
std::pair<double, double> check_kkt(const DeterministicProgram& program,
                                    const Eigen::VectorXd& x);

/// Pivoting LP result, exposed so tests can cross-check the two routes.
struct LpResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;       // in the program's own sense
  Eigen::VectorXd duals;        // one multiplier per constraint, >= 0
  double dual_objective = 0.0;  // same sign convention as objective
};

/// Two-phase dense simplex for cone-free programs. Throws if cones present.
LpResult solve_lp_simplex(const DeterministicProgram& program);

/// Barrier solve exposed for the dual-route LP consistency test.
Solution solve_barrier(const DeterministicProgram& program, const SolverOptions& options = {});

}  // namespace ccp
