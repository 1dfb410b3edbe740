#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ratmax/error.hpp"

namespace ratmax {

/// Denominators with magnitude below this are treated as poles.
inline constexpr double kPoleTolerance = 1e-300;

/// Additive slack used when checking quasiconvexity in floating point.
inline constexpr double kQuasiconvexSlack = 1e-12;

/// N paired records (input vector, target scalar), optionally labelled.
///
/// Inputs are stored one sample per row. Use SampleSet::create to get a
/// validated instance; the fields stay public so that callers can build
/// views cheaply, but every solver assumes the invariants hold.
struct SampleSet {
  Eigen::MatrixXd inputs;          // N x n
  Eigen::VectorXd targets;         // N
  std::vector<std::string> labels; // empty or N

  static SampleSet create(Eigen::MatrixXd inputs, Eigen::VectorXd targets,
                          std::vector<std::string> labels = {});

  /// Throws DataError when an invariant is violated.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(inputs.cols()); }
  bool has_labels() const { return !labels.empty(); }

  SampleSet subset(std::span<const std::size_t> rows) const;
};

/// Degree-(1,1) rational activation R(t) = (a0 + a1 t) / (b0 + b1 t).
struct RationalActivation {
  double a0 = 0.0;
  double a1 = 0.0;
  double b0 = 1.0;
  double b1 = 0.0;

  void validate() const;

  /// Divide every coefficient by b0. Requires b0 > 0.
  RationalActivation normalised() const;

  bool operator==(const RationalActivation&) const = default;
};

struct AffineModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  static AffineModel zero(std::size_t dim);

  /// W x + b.
  double affine(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// (W, b) stacked into one vector of length n + 1.
  Eigen::VectorXd stacked() const;
  static AffineModel from_stacked(const Eigen::Ref<const Eigen::VectorXd>& v);

  bool is_finite() const;
};

enum class Method { Bisection, DiffCorr };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct GridSpec {
  double c = -1.0;
  double d = 1.0;
  std::size_t points = 2001;
};

struct SolverConfig {
  double eps = 1e-5;
  double delta = 1e-6;
  int max_iters = 500;
  double feas_tol = 1e-9;
  int pivot_limit = 50000;
  GridSpec grid;

  /// Throws ConfigError. min_points is the smallest admissible grid size
  /// (n + m + 2 for an (n, m) fit); pass 0 when no grid is involved.
  void validate(std::size_t min_points = 0) const;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

/// Result of a training run. `params` is the raw decision vector of the
/// underlying fit: (W, b) for networks, rational coefficients for
/// activation fits.
struct FitReport {
  std::vector<double> params;
  double final_deviation = 0.0;
  int iterations = 0;
  std::vector<double> trace;
  std::vector<Bracket> brackets; // bisection only
  int lp_solves = 0;
  bool hit_iteration_cap = false;
  double wall_time_seconds = 0.0;

  AffineModel as_affine() const;
};

/// Ratio of affine forms over a shared decision vector v, one row per sample:
///
///   P_i(v) = num_const_i + num_coef.row(i) . v
///   Q_i(v) = den_const_i + den_coef.row(i) . v
///
/// Both the network training problem with a fixed activation and the
/// generalised rational fit with linear bases reduce to this form.
/// `lower`/`upper` bound the decision variables (infinite entries allowed).
struct RationalFitProblem {
  Eigen::VectorXd targets;
  Eigen::MatrixXd num_coef;
  Eigen::VectorXd num_const;
  Eigen::MatrixXd den_coef;
  Eigen::VectorXd den_const;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
  std::size_t num_vars() const { return static_cast<std::size_t>(num_coef.cols()); }

  void validate() const;

  Eigen::VectorXd numerators(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd denominators(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  /// max_i |y_i - P_i/Q_i|. Throws DomainError if some Q_i <= 0.
  double deviation(const Eigen::Ref<const Eigen::VectorXd>& v) const;
};

/// Training problem for a network with fixed activation: v = (W, b).
/// With `box` set, every variable is restricted to [-1, 1].
RationalFitProblem network_problem(const RationalActivation& act, const SampleSet& data,
                                   bool box = false);

double eval_activation(const RationalActivation& act, double t);

double eval_network(const RationalActivation& act, const AffineModel& m,
                    const Eigen::Ref<const Eigen::VectorXd>& x);

double uniform_loss(const RationalActivation& act, const AffineModel& m, const SampleSet& data);

/// Checks loss(l m1 + (1-l) m2) <= max(loss(m1), loss(m2)) + slack at each
/// lambda. Combinations with a nonpositive denominator are skipped.
bool quasiconvexity_probe(const RationalActivation& act, const SampleSet& data,
                          const AffineModel& m1, const AffineModel& m2,
                          std::span<const double> lambdas);

AffineModel convex_combination(const AffineModel& m1, const AffineModel& m2, double lambda);

} // namespace ratmax
