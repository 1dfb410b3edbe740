#pragma once

#include <optional>

#include "ratmax/core.hpp"
#include "ratmax/lp.hpp"

namespace ratmax {

/// Lower bound imposed on the LP slack u in feasibility problems. Any
/// negative value leaves the sign test intact; a finite one keeps the LP
/// bounded when the rational can approach its horizontal asymptote.
inline constexpr double kFeasibilitySlackFloor = -1.0;

/// Optimal slack at or below this value counts as feasible.
inline constexpr double kFeasibilityThreshold = 1e-10;

/// Bisection needs the normalisation Q(v) = 1 at the starting point; for the
/// network problem that is b0 = 1 and the start is W = 0, b = 0.
Bracket init_bounds(const RationalActivation& act, const SampleSet& data);

/// LP over (v, u): minimise u subject to, for every sample i,
///   y_i Q_i - P_i - z Q_i - u <= 0
///   P_i - y_i Q_i - z Q_i - u <= 0
///   -Q_i <= -delta
/// plus the problem's variable bounds and u >= kFeasibilitySlackFloor.
LpProblem feasibility_lp(const RationalFitProblem& problem, double z, double delta);
LpProblem feasibility_lp(const RationalActivation& act, const SampleSet& data, double z,
                         double delta);

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd witness; // decision vector, set iff feasible
  double slack = 0.0;      // optimal u (meaningful unless the LP failed)
  LpStatus status = LpStatus::Infeasible;
};

/// Throws SolverError when the LP hits its pivot limit.
FeasibilityResult check_feasible(const RationalFitProblem& problem, double z, double delta,
                                 const LpOptions& lp = {});

struct NetworkFeasibility {
  bool feasible = false;
  std::optional<AffineModel> witness;
};

NetworkFeasibility is_feasible(const RationalActivation& act, const SampleSet& data, double z,
                               double delta, const LpOptions& lp = {});

/// Quasiconvex bisection on the optimal deviation, starting from the
/// bracket [0, deviation(start)]. The returned params are the witness of
/// the last feasible level.
FitReport bisect_fit(const RationalFitProblem& problem, const Eigen::VectorXd& start,
                     const SolverConfig& cfg);

FitReport train_bisection(const RationalActivation& act, const SampleSet& data,
                          const SolverConfig& cfg);

} // namespace ratmax
