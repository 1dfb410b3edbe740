#include "ratmax/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ratmax/error.hpp"

namespace ratmax {

LpProblem LpProblem::with_vars(Eigen::Index vars) {
  const double inf = std::numeric_limits<double>::infinity();
  LpProblem p;
  p.objective = Eigen::VectorXd::Zero(vars);
  p.constraints.resize(0, vars);
  p.rhs.resize(0);
  p.lower = Eigen::VectorXd::Constant(vars, -inf);
  p.upper = Eigen::VectorXd::Constant(vars, inf);
  return p;
}

void LpProblem::validate() const {
  const auto v = objective.size();
  if (v < 1)
    throw ConfigError("LP has no variables");
  if (constraints.cols() != v || constraints.rows() != rhs.size() || lower.size() != v ||
      upper.size() != v)
    throw ConfigError("LP dimensions are inconsistent");
  if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite())
    throw ConfigError("LP data contains non-finite entries");
  for (Eigen::Index j = 0; j < v; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j))
      throw ConfigError("LP variable " + std::to_string(j) + " has invalid bounds");
    if (lower(j) == std::numeric_limits<double>::infinity() ||
        upper(j) == -std::numeric_limits<double>::infinity())
      throw ConfigError("LP variable " + std::to_string(j) + " has an empty domain");
  }
}

std::string_view to_string(LpStatus s) {
  switch (s) {
  case LpStatus::Optimal:
    return "optimal";
  case LpStatus::Infeasible:
    return "infeasible";
  case LpStatus::Unbounded:
    return "unbounded";
  case LpStatus::IterationLimit:
    return "iteration_limit";
  }
  return "unknown";
}

double max_violation(const LpProblem& p, const Eigen::Ref<const Eigen::VectorXd>& v) {
  double worst = 0.0;
  if (p.num_rows() > 0) {
    const Eigen::VectorXd slack = p.constraints * v - p.rhs;
    worst = std::max(worst, slack.maxCoeff());
  }
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    worst = std::max(worst, p.lower(j) - v(j));
    worst = std::max(worst, v(j) - p.upper(j));
  }
  return worst;
}

namespace {

// One column of the standard-form problem: original variable `var`
// contributes `sign * x` on top of its offset.
struct Column {
  Eigen::Index var;
  double sign;
};

// Dictionary for   maximise c.x  s.t.  A x <= b, x >= 0.
//
// Row i < m reads  x_B[i] = D(i, rhs) - sum_j D(i, j) x_N[j].
// Row m is the phase-two objective, row m + 1 the phase-one objective.
// Column n belongs to the auxiliary variable of phase one (index -1).
class Dictionary {
public:
  Dictionary(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             const LpOptions& opts)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())), stride_(n_ + 2),
        tol_(opts.feas_tol), pivot_limit_(opts.pivot_limit),
        degenerate_limit_(5 * (m_ + n_)), basis_(m_), nonbasis_(n_ + 1),
        d_(static_cast<std::size_t>(m_ + 2) * stride_, 0.0) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j)
        at(i, j) = a(i, j);
      at(i, n_) = -1.0;
      at(i, n_ + 1) = b(i);
      basis_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      at(m_, j) = -c(j);
    }
    nonbasis_[n_] = -1;
    at(m_ + 1, n_) = 1.0;
  }

  LpStatus solve(Eigen::VectorXd& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (at(i, n_ + 1) < at(r, n_ + 1))
        r = i;
    if (m_ > 0 && at(r, n_ + 1) < -tol_) {
      pivot(r, n_);
      const Outcome phase1 = run(2);
      if (phase1 == Outcome::Limit)
        return LpStatus::IterationLimit;
      if (phase1 == Outcome::Unbounded)
        return LpStatus::IterationLimit; // cannot happen in exact arithmetic
      if (at(m_ + 1, n_ + 1) < -tol_)
        return LpStatus::Infeasible;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1)
          continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (nonbasis_[j] != -1 && (s == -1 || std::abs(at(i, j)) > std::abs(at(i, s))))
            s = j;
        if (s != -1 && std::abs(at(i, s)) > tol_)
          pivot(i, s);
      }
    }
    const Outcome phase2 = run(1);
    if (phase2 == Outcome::Limit)
      return LpStatus::IterationLimit;
    if (phase2 == Outcome::Unbounded)
      return LpStatus::Unbounded;
    x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_)
        x(basis_[i]) = std::max(0.0, at(i, n_ + 1));
    return LpStatus::Optimal;
  }

  int pivots() const { return pivots_; }

private:
  enum class Outcome { Optimal, Unbounded, Limit };

  double& at(int i, int j) { return d_[static_cast<std::size_t>(i) * stride_ + j]; }

  void pivot(int r, int s) {
    double* pr = &at(r, 0);
    const double inv = 1.0 / pr[s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r)
        continue;
      double* pi = &at(i, 0);
      const double f = pi[s] * inv;
      if (f == 0.0)
        continue;
      for (int j = 0; j < stride_; ++j)
        pi[j] -= pr[j] * f;
      pi[s] = -f;
    }
    for (int j = 0; j < stride_; ++j)
      pr[j] *= inv;
    pr[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
    ++pivots_;
  }

  int entering(int row, int excluded) {
    int s = -1;
    for (int j = 0; j <= n_; ++j) {
      if (nonbasis_[j] == excluded)
        continue;
      const double rc = at(row, j);
      if (rc >= -tol_)
        continue;
      if (bland_) {
        if (s == -1 || nonbasis_[j] < nonbasis_[s])
          s = j;
      } else if (s == -1 || rc < at(row, s) || (rc == at(row, s) && nonbasis_[j] < nonbasis_[s])) {
        s = j;
      }
    }
    return s;
  }

  int leaving(int s) {
    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double piv = at(i, s);
      if (piv <= tol_)
        continue;
      const double ratio = std::max(0.0, at(i, n_ + 1)) / piv;
      if (r == -1 || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
        r = i;
        best = ratio;
      }
    }
    return r;
  }

  // run(1) optimises the real objective (row m) with the auxiliary variable
  // barred from entering; run(2) optimises the phase-one objective (row m + 1).
  Outcome run(int phase) {
    const int row = m_ + phase - 1;
    const int excluded = -phase;
    for (;;) {
      const int s = entering(row, excluded);
      if (s == -1)
        return Outcome::Optimal;
      const int r = leaving(s);
      if (r == -1)
        return Outcome::Unbounded;
      if (pivots_ >= pivot_limit_)
        return Outcome::Limit;
      if (std::max(0.0, at(r, n_ + 1)) / at(r, s) <= tol_ && ++degenerate_ > degenerate_limit_)
        bland_ = true;
      pivot(r, s);
    }
  }

  int m_, n_, stride_;
  double tol_;
  int pivot_limit_;
  int degenerate_limit_;
  int degenerate_ = 0;
  int pivots_ = 0;
  bool bland_ = false;
  std::vector<int> basis_, nonbasis_;
  std::vector<double> d_;
};

} // namespace

LpSolution solve_lp(const LpProblem& p, const LpOptions& opts) {
  p.validate();
  if (!(opts.feas_tol > 0.0) || opts.pivot_limit < 1)
    throw ConfigError("LP options out of range");

  const Eigen::Index nv = p.num_vars();
  const Eigen::Index nr = p.num_rows();

  std::vector<Column> cols;
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(nv);
  std::vector<std::pair<Eigen::Index, double>> upper_rows; // (column, bound)
  for (Eigen::Index j = 0; j < nv; ++j) {
    const bool has_lo = std::isfinite(p.lower(j));
    const bool has_up = std::isfinite(p.upper(j));
    if (has_lo) {
      offset(j) = p.lower(j);
      if (has_up)
        upper_rows.emplace_back(static_cast<Eigen::Index>(cols.size()), p.upper(j) - p.lower(j));
      cols.push_back({j, 1.0});
    } else if (has_up) {
      offset(j) = p.upper(j);
      cols.push_back({j, -1.0});
    } else {
      cols.push_back({j, 1.0});
      cols.push_back({j, -1.0});
    }
  }

  const auto n = static_cast<Eigen::Index>(cols.size());
  const auto m = nr + static_cast<Eigen::Index>(upper_rows.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  Eigen::VectorXd c(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a.block(0, k, nr, 1) = cols[k].sign * p.constraints.col(cols[k].var);
    c(k) = -cols[k].sign * p.objective(cols[k].var);
  }
  if (nr > 0)
    b.head(nr) = p.rhs - p.constraints * offset;
  for (std::size_t k = 0; k < upper_rows.size(); ++k) {
    const auto row = nr + static_cast<Eigen::Index>(k);
    a(row, upper_rows[k].first) = 1.0;
    b(row) = upper_rows[k].second;
  }

  Dictionary dict(a, b, c, opts);
  Eigen::VectorXd x;
  LpSolution sol;
  sol.status = dict.solve(x);
  sol.pivots = dict.pivots();
  if (sol.status != LpStatus::Optimal)
    return sol;

  sol.values = offset;
  for (Eigen::Index k = 0; k < n; ++k)
    sol.values(cols[k].var) += cols[k].sign * x(k);
  sol.objective_value = p.objective.dot(sol.values);
  return sol;
}

} // namespace ratmax
