#include "ratmax/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratmax/bisect.hpp"
#include "ratmax/diffcorr.hpp"

namespace ratmax {

TargetFunction TargetFunction::relu() { return {}; }

TargetFunction TargetFunction::lrelu(double slope) {
  if (!(slope > 0.0 && slope < 1.0))
    throw ConfigError("LReLU slope must lie in (0, 1)");
  TargetFunction f;
  f.kind_ = Kind::LReLU;
  f.slope_ = slope;
  return f;
}

TargetFunction TargetFunction::custom(std::function<double(double)> fn, std::string name) {
  if (!fn)
    throw ConfigError("custom target function is empty");
  TargetFunction f;
  f.kind_ = Kind::Custom;
  f.custom_ = std::move(fn);
  f.name_ = std::move(name);
  return f;
}

double TargetFunction::operator()(double t) const {
  switch (kind_) {
  case Kind::ReLU:
    return t > 0.0 ? t : 0.0;
  case Kind::LReLU:
    return t >= 0.0 ? t : slope_ * t;
  case Kind::Custom:
    return custom_(t);
  }
  return 0.0;
}

std::string TargetFunction::name() const {
  switch (kind_) {
  case Kind::ReLU:
    return "relu";
  case Kind::LReLU:
    return "lrelu";
  case Kind::Custom:
    return name_;
  }
  return {};
}

namespace {

double grid_point(double c, double d, std::size_t k, std::size_t points) {
  if (k + 1 == points)
    return d;
  return c + (d - c) * static_cast<double>(k) / static_cast<double>(points - 1);
}

} // namespace

SampleSet build_grid_problem(const TargetFunction& target, double c, double d, std::size_t points) {
  if (!(c < d) || !std::isfinite(c) || !std::isfinite(d))
    throw ConfigError("grid interval must satisfy c < d");
  if (points < kMinGridPoints)
    throw ConfigError("a (1,1) fit needs at least " + std::to_string(kMinGridPoints) +
                      " grid points");
  const auto n = static_cast<Eigen::Index>(points);
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k, 0) = grid_point(c, d, static_cast<std::size_t>(k), points);
    y(k) = target(x(k, 0));
  }
  return SampleSet::create(std::move(x), std::move(y));
}

ActivationFit fit_activation(const TargetFunction& target, const SolverConfig& cfg, Method method) {
  cfg.validate(kMinGridPoints);
  const SampleSet grid = build_grid_problem(target, cfg.grid.c, cfg.grid.d, cfg.grid.points);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::VectorXd x = grid.inputs.col(0);
  const double inf = std::numeric_limits<double>::infinity();

  RationalFitProblem p;
  p.targets = grid.targets;
  p.num_const = Eigen::VectorXd::Zero(n);
  ActivationFit out;

  if (method == Method::Bisection) {
    // v = (p0, p1, q1), Q = 1 + q1 x
    p.num_coef = Eigen::MatrixXd::Zero(n, 3);
    p.num_coef.col(0).setOnes();
    p.num_coef.col(1) = x;
    p.den_coef = Eigen::MatrixXd::Zero(n, 3);
    p.den_coef.col(2) = x;
    p.den_const = Eigen::VectorXd::Ones(n);
    p.lower = Eigen::VectorXd::Constant(3, -inf);
    p.upper = Eigen::VectorXd::Constant(3, inf);
    out.report = bisect_fit(p, Eigen::VectorXd::Zero(3), cfg);
    const auto& v = out.report.params;
    out.activation = {v[0], v[1], 1.0, v[2]};
  } else {
    // v = (p0, p1, q0, q1), Q = q0 + q1 x, |q_j| <= 1
    p.num_coef = Eigen::MatrixXd::Zero(n, 4);
    p.num_coef.col(0).setOnes();
    p.num_coef.col(1) = x;
    p.den_coef = Eigen::MatrixXd::Zero(n, 4);
    p.den_coef.col(2).setOnes();
    p.den_coef.col(3) = x;
    p.den_const = Eigen::VectorXd::Zero(n);
    p.lower = Eigen::Vector4d(-inf, -inf, -1.0, -1.0);
    p.upper = Eigen::Vector4d(inf, inf, 1.0, 1.0);
    out.report = diffcorr_fit(p, Eigen::Vector4d(0.0, 0.0, 1.0, 0.0), cfg);
    const auto& v = out.report.params;
    if (!(v[2] > 0.0))
      throw SolverError("differential correction returned q0 <= 0; cannot normalise");
    out.activation = RationalActivation{v[0], v[1], v[2], v[3]}.normalised();
  }
  return out;
}

EquioscillationReport equioscillation_report(const RationalActivation& act,
                                             const TargetFunction& target, double c, double d,
                                             const EquioscillationOptions& opts) {
  if (!(c < d))
    throw ConfigError("probe interval must satisfy c < d");
  if (opts.probe_points < 3)
    throw ConfigError("probe grid needs at least 3 points");

  const std::size_t n = opts.probe_points;
  std::vector<double> xs(n), es(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = grid_point(c, d, k, n);
    es[k] = target(xs[k]) - eval_activation(act, xs[k]);
  }

  EquioscillationReport rep;
  for (const double e : es)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(e));

  // Walk maximal runs of equal values; a run is an extremum when both
  // neighbouring runs lie on the same side of it (or it touches an end).
  std::size_t k = 0;
  while (k < n) {
    std::size_t end = k;
    while (end + 1 < n && es[end + 1] == es[k])
      ++end;
    const double e = es[k];
    const bool has_left = k > 0;
    const bool has_right = end + 1 < n;
    const double left = has_left ? es[k - 1] : 0.0;
    const double right = has_right ? es[end + 1] : 0.0;
    const bool is_max = (!has_left || left < e) && (!has_right || right < e);
    const bool is_min = (!has_left || left > e) && (!has_right || right > e);
    if ((is_max || is_min) && std::abs(e) > opts.noise_floor)
      rep.extrema.push_back({0.5 * (xs[k] + xs[end]), e});
    k = end + 1;
  }

  if (rep.max_deviation <= opts.noise_floor)
    return rep;

  // Greedy alternation count over the near-maximal extrema, keeping the
  // larger of consecutive same-sign entries.
  const double level = (1.0 - opts.tolerance) * rep.max_deviation;
  std::vector<double> run;
  for (const auto& ex : rep.extrema) {
    if (std::abs(ex.error) < level)
      continue;
    if (!run.empty() && std::signbit(run.back()) == std::signbit(ex.error)) {
      if (std::abs(ex.error) > std::abs(run.back()))
        run.back() = ex.error;
    } else {
      run.push_back(ex.error);
    }
  }
  rep.alternations = static_cast<int>(run.size());
  rep.optimal = rep.alternations >= opts.required;
  return rep;
}

std::vector<ErrorCurvePoint> error_curve(const RationalActivation& act,
                                         const TargetFunction& target, double c, double d,
                                         std::size_t points) {
  if (!(c < d) || points < 2)
    throw ConfigError("error curve needs c < d and at least 2 points");
  std::vector<ErrorCurvePoint> out;
  out.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = grid_point(c, d, k, points);
    const double f = target(x);
    const double r = eval_activation(act, x);
    out.push_back({x, f, r, f - r});
  }
  return out;
}

} // namespace ratmax
