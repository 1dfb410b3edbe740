#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ratmax/bisect.hpp"
#include "ratmax/diffcorr.hpp"

using namespace ratmax;

namespace {

SampleSet scalar_set(std::vector<double> xs, std::vector<double> ys) {
  return oracle::ScalarInstance{std::move(xs), std::move(ys)}.samples();
}

// Minimum of the auxiliary expression over [-1, 1]^2 on a 1e-3 grid.
double aux_grid_min(const RationalActivation& act, const oracle::ScalarInstance& s,
                    const AffineModel& prev, double prev_dev) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    const double w = -1.0 + 1e-3 * i;
    for (int j = 0; j <= 2000; ++j) {
      const double b = -1.0 + 1e-3 * j;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.x.size(); ++k) {
        const double t = w * s.x[k] + b;
        const double tp = prev.weights(0) * s.x[k] + prev.bias;
        const double p = act.a0 + act.a1 * t;
        const double q = act.b0 + act.b1 * t;
        const double qp = act.b0 + act.b1 * tp;
        worst = std::max(worst, (std::abs(s.y[k] * q - p) - prev_dev * q) / qp);
      }
      best = std::min(best, worst);
    }
  }
  return best;
}

} // namespace

TEST_CASE("one step against a grid search of the auxiliary expression") {
  const RationalActivation identity{0, 1, 1, 0};
  const oracle::ScalarInstance s{{-0.5, 0.8}, {0.3, -0.2}};
  const auto data = s.samples();
  const auto start = AffineModel::zero(1);
  const double d0 = uniform_loss(identity, start, data);
  const auto step = dc_step(identity, data, start, d0);
  CHECK(std::abs(step.aux_value - aux_grid_min(identity, s, start, d0)) <= 2e-3);
  CHECK(std::abs(step.model.weights(0)) <= 1 + 1e-9);
  CHECK(std::abs(step.model.bias) <= 1 + 1e-9);
}

TEST_CASE("auxiliary expression at the previous model is not positive") {
  const auto act = oracle::relu_activation();
  const auto inst = oracle::planted_instance(3, 5, act);
  const auto data = inst.samples();
  const auto prob = network_problem(act, data, true);
  for (double w : {-0.5, 0.0, 0.4})
    for (double b : {-0.2, 0.3}) {
      Eigen::Vector2d v(w, b);
      const double dev = prob.deviation(v);
      CHECK(dc_auxiliary(prob, v, dev, v) <= 1e-15);
      CHECK(dc_auxiliary(prob, v, dev, v) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("fixed point at the optimum") {
  const auto act = oracle::relu_activation();
  const auto data = oracle::planted_instance(4, 4, act).samples();
  SolverConfig cfg;
  cfg.eps = 1e-9;
  const auto r = train_diffcorr(act, data, cfg);
  const auto m = r.as_affine();
  const double dev = uniform_loss(act, m, data);
  const auto step = dc_step(act, data, m, dev);
  CHECK(step.aux_value >= -1e-9);
  CHECK(uniform_loss(act, step.model, data) >= dev - 1e-5);
}

TEST_CASE("trace descends and iterates stay in the box") {
  const auto act = oracle::relu_activation();
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const auto data = oracle::planted_instance(seed, 5, act).samples();
    const auto r = train_diffcorr(act, data, {});
    for (std::size_t k = 1; k < r.trace.size(); ++k)
      CHECK(r.trace[k] <= r.trace[k - 1] + 1e-9);
    for (double p : r.params)
      CHECK(std::abs(p) <= 1 + 1e-9);
    CHECK(r.final_deviation == r.trace.back());
    CHECK_FALSE(r.hit_iteration_cap);
  }
}

TEST_CASE("interpolable data") {
  const auto act = oracle::relu_activation();
  std::vector<double> xs{-1, 0, 1}, ys;
  for (double x : xs)
    ys.push_back(eval_activation(act, 0.5 * x + 0.25));
  SolverConfig cfg;
  const auto r = train_diffcorr(act, scalar_set(xs, ys), cfg);
  CHECK(r.final_deviation <= cfg.eps);
}

TEST_CASE("final deviation agrees with a box grid search") {
  const auto act = oracle::relu_activation();
  for (std::uint64_t seed : {21u, 22u, 23u, 24u}) {
    const auto inst = oracle::planted_instance(seed, 4, act);
    const auto r = train_diffcorr(act, inst.samples(), {});
    const double grid = oracle::grid_min_loss(act, inst, -1.0, 1.0, 1e-3);
    CAPTURE(seed);
    CHECK(std::abs(r.final_deviation - grid) <= 5e-3);
  }
}

TEST_CASE("agrees with bisection when the optimum is inside the box") {
  const auto act = oracle::relu_activation();
  const auto data = oracle::planted_instance(31, 5, act).samples();
  SolverConfig cfg;
  const auto b = train_bisection(act, data, cfg);
  const auto d = train_diffcorr(act, data, cfg);
  CHECK(b.final_deviation <= d.final_deviation + cfg.eps);
  CHECK(std::abs(b.final_deviation - d.final_deviation) <= 1e-4);
}

TEST_CASE("error states") {
  const auto act = oracle::relu_activation();
  const auto data = scalar_set({2.0}, {0.0});
  AffineModel bad;
  bad.weights = Eigen::VectorXd::Constant(1, 1.0);
  bad.bias = 0.0; // Q = 1 - 0.618 * 2 < 0
  CHECK_THROWS_AS(dc_step(act, data, bad, 1.0), StateError);
  CHECK_THROWS_AS(train_diffcorr({0, 1, -1, 0}, data, {}), ConfigError);
  SolverConfig cfg;
  cfg.eps = -1;
  CHECK_THROWS_AS(train_diffcorr(act, data, cfg), ConfigError);
}
