#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratmax/core.hpp"

namespace ratmax {

/// Function approximated by the activation fit.
class TargetFunction {
public:
  enum class Kind { ReLU, LReLU, Custom };

  static TargetFunction relu();
  /// Leaky ReLU with the given negative-side slope in (0, 1).
  static TargetFunction lrelu(double slope);
  static TargetFunction custom(std::function<double(double)> f, std::string name = "custom");

  double operator()(double t) const;

  Kind kind() const { return kind_; }
  double slope() const { return slope_; }
  std::string name() const;

private:
  Kind kind_ = Kind::ReLU;
  double slope_ = 0.0;
  std::function<double(double)> custom_;
  std::string name_;
};

/// Smallest grid for a degree-(1,1) fit: n + m + 2.
inline constexpr std::size_t kMinGridPoints = 4;

/// Uniform grid over [c, d] (both endpoints included) with targets f(x).
SampleSet build_grid_problem(const TargetFunction& target, double c, double d, std::size_t points);

struct ActivationFit {
  RationalActivation activation; // always normalised to b0 = 1
  FitReport report;
};

/// Best (1,1) rational approximation of `target` on cfg.grid.
///
/// Bisection works on (p0, p1, q1) with q0 = 1 fixed; differential
/// correction works on (p0, p1, q0, q1) with -1 <= q0, q1 <= 1 and the
/// numerator free, and its result is divided through by q0.
ActivationFit fit_activation(const TargetFunction& target, const SolverConfig& cfg, Method method);

struct Extremum {
  double location = 0.0;
  double error = 0.0; // signed f(x) - R(x)
};

struct EquioscillationReport {
  std::vector<Extremum> extrema;
  double max_deviation = 0.0;
  /// Length of the longest sign-alternating run among extrema whose
  /// magnitude is within `tolerance` of max_deviation.
  int alternations = 0;
  /// Empty when the error is identically below the noise floor.
  std::optional<bool> optimal;
};

struct EquioscillationOptions {
  std::size_t probe_points = 20001;
  double tolerance = 0.05;   // relative to max_deviation
  int required = 4;          // n + m + 2 for a (1,1) fit
  double noise_floor = 1e-9; // extrema at or below this magnitude are dropped
};

/// Local extrema of e(x) = f(x) - R(x) on a uniform probe grid over [c, d],
/// found by three-point comparison with plateaus merged. Endpoints count.
EquioscillationReport equioscillation_report(const RationalActivation& act,
                                             const TargetFunction& target, double c, double d,
                                             const EquioscillationOptions& opts = {});

struct ErrorCurvePoint {
  double x, f, r, e;
};

std::vector<ErrorCurvePoint> error_curve(const RationalActivation& act,
                                         const TargetFunction& target, double c, double d,
                                         std::size_t points);

} // namespace ratmax
