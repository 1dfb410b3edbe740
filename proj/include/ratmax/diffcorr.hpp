#pragma once

#include "ratmax/core.hpp"
#include "ratmax/lp.hpp"

namespace ratmax {

/// No-descent threshold: a step whose auxiliary optimum is at or above
/// this value ends the iteration with the previous model.
inline constexpr double kStagnationThreshold = -1e-12;

struct DcStep {
  Eigen::VectorXd params;
  double aux_value = 0.0;
};

/// One differential-correction step: minimise
///   max_i ( |y_i Q_i(v) - P_i(v)| - prev_dev Q_i(v) ) / Q_i(prev)
/// over the problem's variable bounds, as the LP in (v, zbar).
/// Throws StateError if some Q_i(prev) <= 0, SolverError if the LP fails.
DcStep dc_step(const RationalFitProblem& problem, const Eigen::VectorXd& prev, double prev_dev,
               const LpOptions& lp = {});

struct NetworkDcStep {
  AffineModel model;
  double aux_value = 0.0;
};

/// Box-normalised step for the network problem (-1 <= w_j, b <= 1).
NetworkDcStep dc_step(const RationalActivation& act, const SampleSet& data,
                      const AffineModel& prev_model, double prev_dev, const LpOptions& lp = {});

/// Value of the auxiliary expression at v (used to check LP optima).
double dc_auxiliary(const RationalFitProblem& problem, const Eigen::VectorXd& prev, double prev_dev,
                    const Eigen::VectorXd& v);

/// Iterates dc_step from `start` until |D_{k-1} - D_k| <= eps, no descent,
/// or max_iters. trace holds D_0, D_1, ... of accepted iterates.
FitReport diffcorr_fit(const RationalFitProblem& problem, const Eigen::VectorXd& start,
                       const SolverConfig& cfg);

/// Starts from W = 0, b = 0 under the box normalisation.
FitReport train_diffcorr(const RationalActivation& act, const SampleSet& data,
                         const SolverConfig& cfg);

} // namespace ratmax
