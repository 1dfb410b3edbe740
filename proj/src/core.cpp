#include "ratmax/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratmax {

SampleSet SampleSet::create(Eigen::MatrixXd inputs, Eigen::VectorXd targets,
                            std::vector<std::string> labels) {
  SampleSet s{std::move(inputs), std::move(targets), std::move(labels)};
  s.validate();
  return s;
}

void SampleSet::validate() const {
  if (inputs.rows() < 1)
    throw DataError("sample set is empty");
  if (inputs.cols() < 1)
    throw DataError("sample set has zero feature dimension");
  if (targets.size() != inputs.rows())
    throw DataError("sample set has " + std::to_string(inputs.rows()) + " inputs but " +
                    std::to_string(targets.size()) + " targets");
  if (!labels.empty() && labels.size() != size())
    throw DataError("label count does not match sample count");
  if (!inputs.allFinite() || !targets.allFinite())
    throw DataError("sample set contains non-finite values");
}

SampleSet SampleSet::subset(std::span<const std::size_t> rows) const {
  SampleSet out;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    out.inputs.row(static_cast<Eigen::Index>(k)) = inputs.row(r);
    out.targets(static_cast<Eigen::Index>(k)) = targets(r);
    if (has_labels())
      out.labels.push_back(labels[rows[k]]);
  }
  return out;
}

void RationalActivation::validate() const {
  if (a0 == 0.0 && a1 == 0.0 && b0 == 0.0 && b1 == 0.0)
    throw ConfigError("rational activation has all coefficients zero");
  if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(b0) || !std::isfinite(b1))
    throw ConfigError("rational activation has non-finite coefficients");
}

RationalActivation RationalActivation::normalised() const {
  if (!(b0 > 0.0))
    throw DomainError("cannot normalise activation with b0 <= 0");
  return {a0 / b0, a1 / b0, 1.0, b1 / b0};
}

AffineModel AffineModel::zero(std::size_t dim) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)), 0.0};
}

double AffineModel::affine(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != weights.size())
    throw DataError("input dimension " + std::to_string(x.size()) +
                    " does not match model dimension " + std::to_string(weights.size()));
  return weights.dot(x) + bias;
}

Eigen::VectorXd AffineModel::stacked() const {
  Eigen::VectorXd v(weights.size() + 1);
  v.head(weights.size()) = weights;
  v(weights.size()) = bias;
  return v;
}

AffineModel AffineModel::from_stacked(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 1)
    throw DataError("stacked model vector is empty");
  return {v.head(v.size() - 1), v(v.size() - 1)};
}

bool AffineModel::is_finite() const { return weights.allFinite() && std::isfinite(bias); }

std::string_view to_string(Method m) {
  switch (m) {
  case Method::Bisection:
    return "bisection";
  case Method::DiffCorr:
    return "diffcorr";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "bisection")
    return Method::Bisection;
  if (name == "diffcorr")
    return Method::DiffCorr;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected bisection|diffcorr)");
}

void SolverConfig::validate(std::size_t min_points) const {
  if (!(eps > 0.0))
    throw ConfigError("eps must be positive");
  if (!(delta > 0.0))
    throw ConfigError("delta must be positive");
  if (max_iters < 1)
    throw ConfigError("max_iters must be at least 1");
  if (!(feas_tol > 0.0))
    throw ConfigError("feas_tol must be positive");
  if (pivot_limit < 1)
    throw ConfigError("pivot_limit must be at least 1");
  if (min_points > 0) {
    if (!(grid.c < grid.d))
      throw ConfigError("grid interval must satisfy c < d");
    if (grid.points < min_points)
      throw ConfigError("grid needs at least " + std::to_string(min_points) + " points, got " +
                        std::to_string(grid.points));
  }
}

AffineModel FitReport::as_affine() const {
  return AffineModel::from_stacked(
      Eigen::Map<const Eigen::VectorXd>(params.data(), static_cast<Eigen::Index>(params.size())));
}

void RationalFitProblem::validate() const {
  const auto n = targets.size();
  const auto v = num_coef.cols();
  if (n < 1)
    throw DataError("rational fit problem has no samples");
  if (num_coef.rows() != n || den_coef.rows() != n || num_const.size() != n ||
      den_const.size() != n)
    throw DataError("rational fit problem has inconsistent row counts");
  if (den_coef.cols() != v || lower.size() != v || upper.size() != v)
    throw DataError("rational fit problem has inconsistent variable counts");
  if (!targets.allFinite() || !num_coef.allFinite() || !den_coef.allFinite() ||
      !num_const.allFinite() || !den_const.allFinite())
    throw DataError("rational fit problem contains non-finite values");
  for (Eigen::Index j = 0; j < v; ++j)
    if (lower(j) > upper(j))
      throw ConfigError("variable lower bound exceeds upper bound");
}

Eigen::VectorXd RationalFitProblem::numerators(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return num_const + num_coef * v;
}

Eigen::VectorXd RationalFitProblem::denominators(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return den_const + den_coef * v;
}

double RationalFitProblem::deviation(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::VectorXd p = numerators(v);
  const Eigen::VectorXd q = denominators(v);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(q(i) > 0.0))
      throw DomainError("nonpositive denominator at sample " + std::to_string(i));
    worst = std::max(worst, std::abs(targets(i) - p(i) / q(i)));
  }
  return worst;
}

RationalFitProblem network_problem(const RationalActivation& act, const SampleSet& data, bool box) {
  act.validate();
  data.validate();
  const auto n = data.inputs.rows();
  const auto dim = data.inputs.cols();

  // t_i = [x_i, 1] . v, then P_i = a0 + a1 t_i and Q_i = b0 + b1 t_i.
  Eigen::MatrixXd t(n, dim + 1);
  t.leftCols(dim) = data.inputs;
  t.col(dim).setOnes();

  RationalFitProblem p;
  p.targets = data.targets;
  p.num_coef = act.a1 * t;
  p.num_const = Eigen::VectorXd::Constant(n, act.a0);
  p.den_coef = act.b1 * t;
  p.den_const = Eigen::VectorXd::Constant(n, act.b0);
  const double inf = std::numeric_limits<double>::infinity();
  p.lower = Eigen::VectorXd::Constant(dim + 1, box ? -1.0 : -inf);
  p.upper = Eigen::VectorXd::Constant(dim + 1, box ? 1.0 : inf);
  return p;
}

double eval_activation(const RationalActivation& act, double t) {
  const double q = act.b0 + act.b1 * t;
  if (std::abs(q) < kPoleTolerance)
    throw DomainError("activation evaluated at a pole");
  return (act.a0 + act.a1 * t) / q;
}

double eval_network(const RationalActivation& act, const AffineModel& m,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double t = m.affine(x);
  const double q = act.b0 + act.b1 * t;
  if (!(q > 0.0))
    throw DomainError("nonpositive denominator: model outside the feasible region");
  return (act.a0 + act.a1 * t) / q;
}

double uniform_loss(const RationalActivation& act, const AffineModel& m, const SampleSet& data) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
    const double s = eval_network(act, m, data.inputs.row(i).transpose());
    worst = std::max(worst, std::abs(data.targets(i) - s));
  }
  return worst;
}

AffineModel convex_combination(const AffineModel& m1, const AffineModel& m2, double lambda) {
  if (m1.weights.size() != m2.weights.size())
    throw DataError("models have different dimensions");
  return {lambda * m1.weights + (1.0 - lambda) * m2.weights,
          lambda * m1.bias + (1.0 - lambda) * m2.bias};
}

bool quasiconvexity_probe(const RationalActivation& act, const SampleSet& data,
                          const AffineModel& m1, const AffineModel& m2,
                          std::span<const double> lambdas) {
  const double bound = std::max(uniform_loss(act, m1, data), uniform_loss(act, m2, data));
  for (const double lambda : lambdas) {
    if (lambda < 0.0 || lambda > 1.0)
      throw ConfigError("lambda outside [0, 1]");
    double loss = 0.0;
    try {
      loss = uniform_loss(act, convex_combination(m1, m2, lambda), data);
    } catch (const DomainError&) {
      continue;
    }
    if (loss > bound + kQuasiconvexSlack)
      return false;
  }
  return true;
}

} // namespace ratmax
