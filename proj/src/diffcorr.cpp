#include "ratmax/diffcorr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ratmax {

namespace {

Eigen::VectorXd checked_denominators(const RationalFitProblem& problem, const Eigen::VectorXd& v) {
  Eigen::VectorXd q = problem.denominators(v);
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (!(q(i) > 0.0))
      throw StateError("nonpositive denominator at sample " + std::to_string(i) +
                       " in differential correction");
  return q;
}

} // namespace

double dc_auxiliary(const RationalFitProblem& problem, const Eigen::VectorXd& prev, double prev_dev,
                    const Eigen::VectorXd& v) {
  const Eigen::VectorXd qprev = checked_denominators(problem, prev);
  const Eigen::VectorXd p = problem.numerators(v);
  const Eigen::VectorXd q = problem.denominators(v);
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double r = std::abs(problem.targets(i) * q(i) - p(i)) - prev_dev * q(i);
    worst = std::max(worst, r / qprev(i));
  }
  return worst;
}

DcStep dc_step(const RationalFitProblem& problem, const Eigen::VectorXd& prev, double prev_dev,
               const LpOptions& lp_opts) {
  problem.validate();
  const Eigen::VectorXd qprev = checked_denominators(problem, prev);
  const auto n = static_cast<Eigen::Index>(problem.size());
  const auto nv = static_cast<Eigen::Index>(problem.num_vars());
  const auto zbar = nv;

  LpProblem lp = LpProblem::with_vars(nv + 1);
  lp.objective(zbar) = 1.0;
  lp.lower.head(nv) = problem.lower;
  lp.upper.head(nv) = problem.upper;
  lp.constraints = Eigen::MatrixXd::Zero(2 * n, nv + 1);
  lp.rhs.resize(2 * n);

  // Each row is divided through by the (positive) previous denominator.
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = problem.targets(i);
    const double w = 1.0 / qprev(i);
    const auto p = problem.num_coef.row(i);
    const auto q = problem.den_coef.row(i);
    const double p0 = problem.num_const(i);
    const double q0 = problem.den_const(i);

    // (y - D) Q - P - zbar Q_prev <= 0
    lp.constraints.row(2 * i).head(nv) = w * ((y - prev_dev) * q - p);
    lp.constraints(2 * i, zbar) = -1.0;
    lp.rhs(2 * i) = w * (p0 - (y - prev_dev) * q0);

    // P - (y + D) Q - zbar Q_prev <= 0
    lp.constraints.row(2 * i + 1).head(nv) = w * (p - (y + prev_dev) * q);
    lp.constraints(2 * i + 1, zbar) = -1.0;
    lp.rhs(2 * i + 1) = w * ((y + prev_dev) * q0 - p0);
  }

  const LpSolution sol = solve_lp(lp, lp_opts);
  if (!sol.optimal())
    throw SolverError("differential correction LP ended with status " +
                      std::string(to_string(sol.status)));
  return {sol.values.head(nv), sol.objective_value};
}

NetworkDcStep dc_step(const RationalActivation& act, const SampleSet& data,
                      const AffineModel& prev_model, double prev_dev, const LpOptions& lp) {
  const DcStep s = dc_step(network_problem(act, data, true), prev_model.stacked(), prev_dev, lp);
  return {AffineModel::from_stacked(s.params), s.aux_value};
}

FitReport diffcorr_fit(const RationalFitProblem& problem, const Eigen::VectorXd& start,
                       const SolverConfig& cfg) {
  cfg.validate();
  problem.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const LpOptions lp{cfg.feas_tol, cfg.pivot_limit};

  checked_denominators(problem, start);
  Eigen::VectorXd current = start;
  double dev = problem.deviation(current);

  FitReport report;
  report.trace.push_back(dev);

  bool converged = dev == 0.0;
  bool stalled = false;
  while (!converged && !stalled && report.iterations < cfg.max_iters) {
    const DcStep step = dc_step(problem, current, dev, lp);
    ++report.iterations;
    ++report.lp_solves;
    if (step.aux_value >= kStagnationThreshold) {
      stalled = true;
      break;
    }
    checked_denominators(problem, step.params);
    const double next = problem.deviation(step.params);
    if (next > dev) {
      stalled = true; // LP noise; the exact step never increases the deviation
      break;
    }
    const double change = dev - next;
    current = step.params;
    dev = next;
    report.trace.push_back(dev);
    converged = change <= cfg.eps || dev == 0.0;
  }
  report.hit_iteration_cap = !converged && !stalled;

  report.params.assign(current.data(), current.data() + current.size());
  report.final_deviation = dev;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

FitReport train_diffcorr(const RationalActivation& act, const SampleSet& data,
                         const SolverConfig& cfg) {
  cfg.validate();
  if (!(act.b0 > 0.0))
    throw ConfigError("differential correction needs b0 > 0 for the zero start");
  return diffcorr_fit(network_problem(act, data, true), Eigen::VectorXd::Zero(data.dim() + 1),
                      cfg);
}

} // namespace ratmax
