#include "ccp/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ccp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Dense two-phase tableau simplex, Bland's rule.
// Internal form: minimize c'x subject to A x <= b, x >= 0.
// ---------------------------------------------------------------------------

struct SimplexOutcome {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd multipliers;  // lambda >= 0 for A x <= b
};

class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())) {
    // Columns: n structural, m slack, up to m artificial.
    int artificials = 0;
    for (int i = 0; i < m_; ++i)
      if (b(i) < 0.0) ++artificials;
    cols_ = n_ + m_ + artificials;
    t_ = Eigen::MatrixXd::Zero(m_, cols_ + 1);
    basis_.resize(m_);
    artificial_start_ = n_ + m_;

    int art = artificial_start_;
    for (int i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = sign;  // slack
      t_(i, cols_) = sign * b(i);
      if (b(i) < 0.0) {
        t_(i, art) = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
    cost_ = Eigen::VectorXd::Zero(cols_);
    cost_.head(n_) = c;
    phase1_needed_ = artificials > 0;
  }

  SimplexOutcome run() {
    SimplexOutcome out;
    if (phase1_needed_) {
      Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols_);
      for (int j = artificial_start_; j < cols_; ++j) phase1(j) = 1.0;
      if (!iterate(phase1)) return out;  // numerical failure / unbounded phase 1
      if (objective_of(phase1) > 1e-8) {
        out.status = SolveStatus::infeasible;
        return out;
      }
      drive_out_artificials();
    }
    if (!iterate(cost_, /*forbid_from=*/artificial_start_)) {
      out.status = SolveStatus::numerical_failure;  // unbounded counts as failure here
      return out;
    }
    out.status = SolveStatus::optimal;
    out.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x(basis_[i]) = t_(i, cols_);
    out.objective = objective_of(cost_);
    // Multipliers from slack reduced costs: lambda_i = -reduced_cost(slack_i)
    // is >= 0 at optimality of the <=-form minimum.
    const Eigen::VectorXd red = reduced_costs(cost_);
    out.multipliers = Eigen::VectorXd(m_);
    for (int i = 0; i < m_; ++i) out.multipliers(i) = std::max(0.0, red(n_ + i));
    return out;
  }

 private:
  double objective_of(const Eigen::VectorXd& cost) const {
    double z = 0.0;
    for (int i = 0; i < m_; ++i) z += cost(basis_[i]) * t_(i, cols_);
    return z;
  }

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) y(i) = cost(basis_[i]);
    return cost - t_.leftCols(cols_).transpose() * y;
  }

  bool iterate(const Eigen::VectorXd& cost, int forbid_from = -1) {
    for (int iter = 0; iter < 20000; ++iter) {
      const Eigen::VectorXd red = reduced_costs(cost);
      int entering = -1;
      for (int j = 0; j < cols_; ++j) {
        if (forbid_from >= 0 && j >= forbid_from) continue;
        if (red(j) < -1e-10) {  // Bland: first improving column
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      int leaving = -1;
      double best_ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        if (t_(i, entering) > 1e-12) {
          const double ratio = t_(i, cols_) / t_(i, entering);
          if (ratio < best_ratio - 1e-12 ||
              (std::abs(ratio - best_ratio) <= 1e-12 &&
               (leaving < 0 || basis_[i] < basis_[leaving]))) {
            best_ratio = ratio;
            leaving = i;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded
      pivot(leaving, entering);
    }
    return false;
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double factor = t_(i, col);
      if (factor != 0.0) t_.row(i) -= factor * t_.row(row);
    }
    basis_[row] = col;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < artificial_start_) continue;
      for (int j = 0; j < artificial_start_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  int m_, n_, cols_, artificial_start_;
  Eigen::MatrixXd t_;
  Eigen::VectorXd cost_;
  std::vector<int> basis_;
  bool phase1_needed_ = false;
};

// ---------------------------------------------------------------------------
// Smoothed cone helpers for the barrier path.
// ---------------------------------------------------------------------------

struct QuadForm {
  Eigen::MatrixXd mxx;  // n x n
  Eigen::VectorXd mxb;  // n, zero unless augmented
  double mbb = 0.0;

  double q(const Eigen::VectorXd& x) const {
    return x.dot(mxx * x) - 2.0 * mxb.dot(x) + mbb;
  }
  Eigen::VectorXd dq(const Eigen::VectorXd& x) const { return 2.0 * (mxx * x - mxb); }
};

QuadForm quad_form(const ConeTerm& cone, int n) {
  const Eigen::MatrixXd m = cone.root.transpose() * cone.root;
  QuadForm qf;
  if (cone.uses_augmented) {
    qf.mxx = m.topLeftCorner(n, n);
    qf.mxb = -m.topRightCorner(n, 1);  // y = (x', -1)': cross term enters with -1
    qf.mbb = m(n, n);
  } else {
    qf.mxx = m;
    qf.mxb = Eigen::VectorXd::Zero(n);
  }
  return qf;
}

// One smooth scalar term kappa * sqrt(q(x) + eps) with gradient and Hessian.
struct SmoothCone {
  double kappa = 0.0;
  QuadForm qf;
  double eps = 0.0;

  double value(const Eigen::VectorXd& x) const {
    return kappa * std::sqrt(qf.q(x) + eps);
  }
  void add_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                       Eigen::MatrixXd& hess, double weight) const {
    const double h = std::sqrt(qf.q(x) + eps);
    const Eigen::VectorXd dq = qf.dq(x);
    grad += weight * kappa * dq / (2.0 * h);
    hess += weight * kappa *
            (qf.mxx / h - dq * dq.transpose() / (4.0 * h * h * h));
  }
};

struct BarrierProblem {
  int n = 0;
  double sense_sign = 1.0;  // +1 minimize, -1 maximize (internal minimize)
  Eigen::VectorXd w;
  std::optional<SmoothCone> obj_cone;
  struct Row {
    Eigen::VectorXd u;
    double e = 0.0;
    std::optional<SmoothCone> cone;
  };
  std::vector<Row> rows;

  double f0(const Eigen::VectorXd& x) const {
    double v = w.dot(x);
    if (obj_cone) v += obj_cone->value(x);
    return sense_sign * v;
  }
  void f0_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                      Eigen::MatrixXd& hess) const {
    grad += sense_sign * w;
    if (obj_cone) obj_cone->add_derivatives(x, grad, hess, sense_sign);
  }
  double ci(int i, const Eigen::VectorXd& x) const {
    double v = rows[i].u.dot(x) + rows[i].e;
    if (rows[i].cone) v += rows[i].cone->value(x);
    return v;
  }
  Eigen::VectorXd ci_grad(int i, const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = rows[i].u;
    if (rows[i].cone) {
      Eigen::MatrixXd dummy = Eigen::MatrixXd::Zero(n, n);
      rows[i].cone->add_derivatives(x, g, dummy, 1.0);
    }
    return g;
  }
};

BarrierProblem make_barrier_problem(const DeterministicProgram& program, double eps) {
  BarrierProblem bp;
  bp.n = program.n_vars();
  bp.sense_sign = program.sense == Sense::maximize ? -1.0 : 1.0;
  bp.w = program.linear_objective;
  if (program.cone_objective && program.cone_objective->kappa != 0.0) {
    SmoothCone sc;
    sc.kappa = program.cone_objective->kappa;
    sc.qf = quad_form(*program.cone_objective, bp.n);
    sc.eps = eps;
    bp.obj_cone = sc;
  }
  for (const auto& c : program.constraints) {
    BarrierProblem::Row row;
    row.u = c.linear;
    row.e = c.offset;
    if (c.cone && c.cone->kappa != 0.0) {
      SmoothCone sc;
      sc.kappa = c.cone->kappa;
      sc.qf = quad_form(*c.cone, bp.n);
      sc.eps = eps;
      row.cone = sc;
    }
    bp.rows.push_back(std::move(row));
  }
  return bp;
}

// Damped Newton on B(x) = t*f0(x) - sum log(-c_i) - sum log(x_j).
// Returns false if it stalls without reaching the decrement tolerance.
bool newton_centering(const BarrierProblem& bp, double t, Eigen::VectorXd& x,
                      int max_newton, int& iters_used) {
  const int n = bp.n;
  const int m = static_cast<int>(bp.rows.size());
  const auto barrier = [&](const Eigen::VectorXd& xx) -> double {
    for (int j = 0; j < n; ++j)
      if (xx(j) <= 0.0) return kInf;
    double b = t * bp.f0(xx);
    for (int i = 0; i < m; ++i) {
      const double c = bp.ci(i, xx);
      if (c >= 0.0) return kInf;
      b -= std::log(-c);
    }
    for (int j = 0; j < n; ++j) b -= std::log(xx(j));
    return b;
  };

  for (int it = 0; it < max_newton; ++it) {
    ++iters_used;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
    {
      Eigen::VectorXd g0 = Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(n, n);
      bp.f0_derivatives(x, g0, h0);
      grad += t * g0;
      hess += t * h0;
    }
    for (int i = 0; i < m; ++i) {
      const double c = bp.ci(i, x);
      Eigen::VectorXd gc = bp.rows[i].u;
      Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(n, n);
      if (bp.rows[i].cone) bp.rows[i].cone->add_derivatives(x, gc, hc, 1.0);
      grad += gc / (-c);
      hess += gc * gc.transpose() / (c * c) + hc / (-c);
    }
    for (int j = 0; j < n; ++j) {
      grad(j) -= 1.0 / x(j);
      hess(j, j) += 1.0 / (x(j) * x(j));
    }

    // Levenberg regularization keeps the step well defined near vertices.
    Eigen::VectorXd step;
    double reg = 0.0;
    for (;;) {
      Eigen::MatrixXd h = hess;
      if (reg > 0.0) h.diagonal().array() += reg;
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() == Eigen::Success) {
        step = -llt.solve(grad);
        break;
      }
      reg = reg == 0.0 ? 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff()) : reg * 100.0;
      if (reg > 1e20) return false;
    }

    const double decrement2 = -grad.dot(step);
    if (decrement2 * 0.5 < 1e-18) return true;

    const double b0 = barrier(x);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = x + alpha * step;
      const double bc = barrier(cand);
      if (bc < b0 - 1e-4 * alpha * decrement2 * 0.0 + 0.0 && bc < b0 + 1e-14) {
        // Accept on simple decrease; Armijo with the decrement is too strict
        // in the last digits near the central path.
        if (bc <= b0 - 1e-9 * alpha * decrement2 || bc < b0) {
          x = cand;
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) return true;  // no further progress representable
  }
  return true;
}

// Phase 1: minimize s over (x, s) with c_i(x) <= s, x >= 0.
// Returns a strictly feasible x, or nullopt when max_i c_i stays positive.
std::optional<Eigen::VectorXd> barrier_phase1(const BarrierProblem& bp,
                                              const SolverOptions& options) {
  const int n = bp.n;
  const int m = static_cast<int>(bp.rows.size());
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0);

  const auto worst = [&](const Eigen::VectorXd& xx) {
    double w = -kInf;
    for (int i = 0; i < m; ++i) w = std::max(w, bp.ci(i, xx));
    return w;
  };
  if (worst(x) < -1e-6) return x;

  double s = worst(x) + 1.0;
  double t = 1.0;
  int iters = 0;
  for (int outer = 0; outer < 60; ++outer) {
    // Newton in the lifted space (x, s).
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(n + 1);
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n + 1, n + 1);
      grad(n) = t;
      for (int i = 0; i < m; ++i) {
        const double c = bp.ci(i, x) - s;
        Eigen::VectorXd gc = Eigen::VectorXd::Zero(n + 1);
        gc.head(n) = bp.ci_grad(i, x);
        gc(n) = -1.0;
        Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(n + 1, n + 1);
        if (bp.rows[i].cone) {
          Eigen::VectorXd dummy = Eigen::VectorXd::Zero(n);
          Eigen::MatrixXd hxx = Eigen::MatrixXd::Zero(n, n);
          bp.rows[i].cone->add_derivatives(x, dummy, hxx, 1.0);
          hc.topLeftCorner(n, n) = hxx;
        }
        grad += gc / (-c);
        hess += gc * gc.transpose() / (c * c) + hc / (-c);
      }
      for (int j = 0; j < n; ++j) {
        grad(j) -= 1.0 / x(j);
        hess(j, j) += 1.0 / (x(j) * x(j));
      }
      hess.diagonal().array() += 1e-12;
      Eigen::VectorXd step = -Eigen::LDLT<Eigen::MatrixXd>(hess).solve(grad);
      const double dec2 = -grad.dot(step);
      if (dec2 * 0.5 < 1e-14) break;
      double alpha = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        Eigen::VectorXd xc = x + alpha * step.head(n);
        const double sc = s + alpha * step(n);
        bool ok = xc.minCoeff() > 0.0;
        if (ok)
          for (int i = 0; i < m && ok; ++i) ok = bp.ci(i, xc) - sc < 0.0;
        if (ok) {
          x = xc;
          s = sc;
          break;
        }
        alpha *= 0.5;
      }
      if (++iters > options.max_iterations) break;
      if (s < -1e-6) return x;  // strictly feasible already
    }
    if (s < -1e-6) return x;
    if ((m + 1.0) / t < 0.1 * options.feasibility_tol) break;
    t *= 10.0;
  }
  if (s <= options.feasibility_tol) return x;  // feasible within tolerance
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Exact-subgradient KKT diagnostics.
// ---------------------------------------------------------------------------

Eigen::VectorXd exact_cone_grad(const ConeTerm& cone, const Eigen::VectorXd& x, int n) {
  const QuadForm qf = quad_form(cone, n);
  const double q = qf.q(x);
  if (q <= 0.0) return Eigen::VectorXd::Zero(n);  // a valid subgradient member at 0
  return cone.kappa * qf.dq(x) / (2.0 * std::sqrt(q));
}

// min ||g + B z||_2 over z >= 0 via cyclic coordinate descent; tiny systems.
Eigen::VectorXd nnls_residual(const Eigen::VectorXd& g, const Eigen::MatrixXd& b) {
  const int k = static_cast<int>(b.cols());
  if (k == 0) return g;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd r = g;
  for (int sweep = 0; sweep < 5000; ++sweep) {
    double change = 0.0;
    for (int j = 0; j < k; ++j) {
      const double denom = b.col(j).squaredNorm();
      if (denom <= 0.0) continue;
      const double znew = std::max(0.0, z(j) - b.col(j).dot(r) / denom);
      const double dz = znew - z(j);
      if (dz != 0.0) {
        r += dz * b.col(j);
        z(j) = znew;
        change += std::abs(dz);
      }
    }
    if (change < 1e-15) break;
  }
  return r;
}

}  // namespace

std::pair<double, double> check_kkt(const DeterministicProgram& program,
                                    const Eigen::VectorXd& x) {
  const int n = program.n_vars();
  const int m = static_cast<int>(program.constraints.size());
  const double sense_sign = program.sense == Sense::maximize ? -1.0 : 1.0;

  double feas = 0.0;
  std::vector<double> cvals(m);
  for (int i = 0; i < m; ++i) {
    cvals[i] = program.constraint_value(i, x);
    feas = std::max(feas, cvals[i]);
  }
  for (int j = 0; j < n; ++j) feas = std::max(feas, -x(j));
  feas = std::max(feas, 0.0);

  // Objective gradient (internal minimization sense), exact cone subgradient.
  Eigen::VectorXd g = sense_sign * program.linear_objective;
  if (program.cone_objective)
    g += sense_sign * exact_cone_grad(*program.cone_objective, x, n);

  const double act_tol = 1e-6;
  std::vector<Eigen::VectorXd> cols;
  for (int i = 0; i < m; ++i) {
    if (cvals[i] >= -act_tol * (1.0 + std::abs(program.constraints[i].offset))) {
      Eigen::VectorXd gc = program.constraints[i].linear;
      if (program.constraints[i].cone)
        gc += exact_cone_grad(*program.constraints[i].cone, x, n);
      cols.push_back(gc);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (x(j) <= act_tol) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(j) = -1.0;
      cols.push_back(e);
    }
  }
  Eigen::MatrixXd b(n, static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) b.col(static_cast<int>(j)) = cols[j];
  const Eigen::VectorXd r = nnls_residual(g, b);
  return {feas, r.lpNorm<Eigen::Infinity>()};
}

LpResult solve_lp_simplex(const DeterministicProgram& program) {
  if (program.has_cones())
    throw std::invalid_argument("solve_lp_simplex: program has cone terms");
  const int n = program.n_vars();
  const int m = static_cast<int>(program.constraints.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    a.row(i) = program.constraints[i].linear.transpose();
    b(i) = -program.constraints[i].offset;
  }
  const double sense_sign = program.sense == Sense::maximize ? -1.0 : 1.0;
  const Eigen::VectorXd c = sense_sign * program.linear_objective;

  Tableau tab(a, b, c);
  const SimplexOutcome out = tab.run();
  LpResult res;
  res.status = out.status;
  if (out.status != SolveStatus::optimal) return res;
  res.x = out.x;
  res.objective = sense_sign * out.objective;
  res.duals = out.multipliers;
  // Internal dual of min c'x s.t. Ax <= b is max -lambda'b over lambda >= 0
  // with A'lambda + c >= 0... expressed against the <= form: dual obj = -b'lambda
  // shifted to the primal sign convention.
  res.dual_objective = sense_sign * (-b.dot(out.multipliers));
  return res;
}

Solution solve_barrier(const DeterministicProgram& program, const SolverOptions& options) {
  Solution sol;
  const int n = program.n_vars();
  const int m = static_cast<int>(program.constraints.size());
  BarrierProblem bp = make_barrier_problem(program, options.cone_smoothing_eps);

  const auto x0 = barrier_phase1(bp, options);
  if (!x0) {
    sol.status = SolveStatus::infeasible;
    sol.x = Eigen::VectorXd::Zero(n);
    return sol;
  }
  Eigen::VectorXd x = *x0;
  double t = 1.0;
  int iters = 0;
  while ((m + n) / t > 1e-11) {
    if (!newton_centering(bp, t, x, 80, iters)) break;
    if (iters > options.max_iterations) {
      sol.status = SolveStatus::max_iterations;
      sol.x = x;
      return sol;
    }
    t *= 10.0;
  }

  sol.x = x;
  sol.Z_value = program.objective_value(x);
  sol.z_value = program.linear_objective.dot(x);
  const auto [feas, stat] = check_kkt(program, x);
  sol.max_constraint_violation = feas;
  sol.kkt_residual = stat;
  sol.status = (feas <= options.feasibility_tol && stat <= options.kkt_tol)
                   ? SolveStatus::optimal
                   : SolveStatus::numerical_failure;
  return sol;
}

Solution solve(const DeterministicProgram& program, const SolverOptions& options) {
  if (!program.has_cones()) {
    const LpResult lp = solve_lp_simplex(program);
    Solution sol;
    sol.status = lp.status;
    if (lp.status != SolveStatus::optimal) {
      sol.x = Eigen::VectorXd::Zero(program.n_vars());
      return sol;
    }
    sol.x = lp.x;
    sol.Z_value = lp.objective;
    sol.z_value = lp.objective;
    const auto [feas, stat] = check_kkt(program, lp.x);
    sol.max_constraint_violation = feas;
    sol.kkt_residual = stat;
    if (feas > options.feasibility_tol) sol.status = SolveStatus::numerical_failure;
    return sol;
  }
  return solve_barrier(program, options);
}

}  // namespace ccp
