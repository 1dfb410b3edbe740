#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace ratmax {

/// minimise objective . v  subject to  constraints * v <= rhs,  lower <= v <= upper.
/// Bounds may be infinite.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Problem with `vars` free variables and no rows.
  static LpProblem with_vars(Eigen::Index vars);

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return constraints.rows(); }

  /// Throws ConfigError on inconsistent dimensions, non-finite data or
  /// crossed bounds.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd values;       // meaningful iff Optimal
  double objective_value = 0.0; // meaningful iff Optimal
  int pivots = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
  double feas_tol = 1e-9;
  int pivot_limit = 50000;
};

/// Dense two-phase simplex on the dictionary form of the problem.
///
/// Pricing is Dantzig (most negative reduced cost); after 5 (R + V)
/// degenerate pivots the solver switches to Bland's rule for the rest of
/// the solve. Free and upper-bounded variables are shifted or split
/// internally. Deterministic for identical input.
LpSolution solve_lp(const LpProblem& p, const LpOptions& opts = {});

inline LpSolution solve_lp(const LpProblem& p, double feas_tol, int pivot_limit) {
  return solve_lp(p, LpOptions{feas_tol, pivot_limit});
}

/// Largest violation of rows and bounds at v (0 when feasible).
double max_violation(const LpProblem& p, const Eigen::Ref<const Eigen::VectorXd>& v);

} // namespace ratmax
