#include "ratmax/bisect.hpp"

#include <chrono>
#include <cmath>

namespace ratmax {

namespace {

void require_unit_b0(const RationalActivation& act) {
  if (act.b0 != 1.0)
    throw ConfigError("bisection requires the normalisation b0 = 1");
}

} // namespace

Bracket init_bounds(const RationalActivation& act, const SampleSet& data) {
  require_unit_b0(act);
  data.validate();
  return {0.0, (data.targets.array() - act.a0).abs().maxCoeff()};
}

LpProblem feasibility_lp(const RationalFitProblem& problem, double z, double delta) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(problem.size());
  const auto nv = static_cast<Eigen::Index>(problem.num_vars());
  const auto u = nv; // index of the slack variable

  LpProblem lp = LpProblem::with_vars(nv + 1);
  lp.objective(u) = 1.0;
  lp.lower.head(nv) = problem.lower;
  lp.upper.head(nv) = problem.upper;
  lp.lower(u) = kFeasibilitySlackFloor;
  lp.constraints = Eigen::MatrixXd::Zero(3 * n, nv + 1);
  lp.rhs.resize(3 * n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = problem.targets(i);
    const auto p = problem.num_coef.row(i);
    const auto q = problem.den_coef.row(i);
    const double p0 = problem.num_const(i);
    const double q0 = problem.den_const(i);

    // (y - z) Q - P - u <= 0
    lp.constraints.row(3 * i).head(nv) = (y - z) * q - p;
    lp.constraints(3 * i, u) = -1.0;
    lp.rhs(3 * i) = p0 - (y - z) * q0;

    // P - (y + z) Q - u <= 0
    lp.constraints.row(3 * i + 1).head(nv) = p - (y + z) * q;
    lp.constraints(3 * i + 1, u) = -1.0;
    lp.rhs(3 * i + 1) = (y + z) * q0 - p0;

    // -Q <= -delta
    lp.constraints.row(3 * i + 2).head(nv) = -q;
    lp.rhs(3 * i + 2) = q0 - delta;
  }
  return lp;
}

LpProblem feasibility_lp(const RationalActivation& act, const SampleSet& data, double z,
                         double delta) {
  require_unit_b0(act);
  return feasibility_lp(network_problem(act, data), z, delta);
}

FeasibilityResult check_feasible(const RationalFitProblem& problem, double z, double delta,
                                 const LpOptions& lp) {
  FeasibilityResult out;
  if (z < 0.0)
    return out; // the deviation is nonnegative
  const LpSolution sol = solve_lp(feasibility_lp(problem, z, delta), lp);
  out.status = sol.status;
  if (sol.status == LpStatus::IterationLimit)
    throw SolverError("feasibility LP hit the pivot limit at z = " + std::to_string(z));
  if (!sol.optimal())
    return out;
  out.slack = sol.objective_value;
  if (out.slack <= kFeasibilityThreshold) {
    out.feasible = true;
    out.witness = sol.values.head(static_cast<Eigen::Index>(problem.num_vars()));
  }
  return out;
}

NetworkFeasibility is_feasible(const RationalActivation& act, const SampleSet& data, double z,
                               double delta, const LpOptions& lp) {
  require_unit_b0(act);
  const FeasibilityResult r = check_feasible(network_problem(act, data), z, delta, lp);
  NetworkFeasibility out;
  out.feasible = r.feasible;
  if (r.feasible)
    out.witness = AffineModel::from_stacked(r.witness);
  return out;
}

FitReport bisect_fit(const RationalFitProblem& problem, const Eigen::VectorXd& start,
                     const SolverConfig& cfg) {
  cfg.validate();
  problem.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const LpOptions lp{cfg.feas_tol, cfg.pivot_limit};

  Bracket br{0.0, problem.deviation(start)};
  Eigen::VectorXd best = start;

  FitReport report;
  report.brackets.push_back(br);
  report.trace.push_back(br.upper);

  // Exact interpolation at the start: nothing to bisect.
  while (br.upper > 0.0 && br.width() > cfg.eps) {
    const double z = 0.5 * (br.upper + br.lower);
    const FeasibilityResult r = check_feasible(problem, z, cfg.delta, lp);
    ++report.lp_solves;
    ++report.iterations;
    if (r.feasible) {
      br.upper = z;
      best = r.witness;
    } else {
      br.lower = z;
    }
    report.brackets.push_back(br);
    report.trace.push_back(br.upper);
  }

  report.params.assign(best.data(), best.data() + best.size());
  report.final_deviation = problem.deviation(best);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

FitReport train_bisection(const RationalActivation& act, const SampleSet& data,
                          const SolverConfig& cfg) {
  require_unit_b0(act);
  cfg.validate();
  return bisect_fit(network_problem(act, data), Eigen::VectorXd::Zero(data.dim() + 1), cfg);
}

} // namespace ratmax
