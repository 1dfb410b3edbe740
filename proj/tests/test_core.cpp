#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "oracles.hpp"
#include "ratmax/core.hpp"

using namespace ratmax;

namespace {

SampleSet scalar_set(std::vector<double> xs, std::vector<double> ys) {
  return oracle::ScalarInstance{std::move(xs), std::move(ys)}.samples();
}

AffineModel scalar_model(double w, double b) {
  AffineModel m;
  m.weights = Eigen::VectorXd::Constant(1, w);
  m.bias = b;
  return m;
}

} // namespace

TEST_CASE("activation evaluation") {
  const auto act = oracle::relu_activation();
  CHECK(eval_activation(act, 0.0) == oracle::kReluA0);
  CHECK(eval_activation({0, 1, 1, 0}, 7.0) == 7.0);

  // 40-digit evaluation of the reference coefficients.
  CHECK(eval_activation(act, 1.0) == doctest::Approx(1.118031138478844111).epsilon(1e-15));
  CHECK(eval_activation(act, 0.5) == doctest::Approx(0.3944252520280049141).epsilon(1e-15));

  CHECK_THROWS_AS(eval_activation({1, 1, 1, -1}, 1.0), DomainError);
}

TEST_CASE("network evaluation") {
  const auto act = oracle::relu_activation();
  Eigen::VectorXd x(3);
  x << 0.3, -4.0, 12.0;
  CHECK(eval_network(act, AffineModel::zero(3), x) == oracle::kReluA0);

  AffineModel m;
  m.weights = Eigen::Vector2d(2.0, -1.0);
  m.bias = 3.0;
  CHECK(eval_network({0, 1, 1, 0}, m, Eigen::Vector2d(1.0, 1.0)) == 4.0);

  const Eigen::VectorXd half = Eigen::VectorXd::Constant(1, 0.5);
  CHECK(eval_network(act, scalar_model(1.0, 0.0), half) == eval_activation(act, 0.5));
  for (double t : {-1.0, -0.3, 0.0, 0.77, 1.5})
    CHECK(eval_network(act, scalar_model(1.0, 0.0), Eigen::VectorXd::Constant(1, t)) ==
          eval_activation(act, t));

  CHECK_THROWS_AS(eval_network(act, scalar_model(1.0, 0.0), Eigen::VectorXd::Constant(1, 2.0)),
                  DomainError);
  CHECK_THROWS_AS(eval_network(act, AffineModel::zero(2), x), DataError);
}

TEST_CASE("uniform loss") {
  const auto act = oracle::relu_activation();
  SUBCASE("exact interpolation gives zero") {
    const std::vector<double> xs{-1.0, 0.0, 0.4};
    std::vector<double> ys;
    for (double x : xs)
      ys.push_back(eval_activation(act, 0.7 * x - 0.1));
    CHECK(uniform_loss(act, scalar_model(0.7, -0.1), scalar_set(xs, ys)) == 0.0);
  }
  SUBCASE("zero model gives the largest offset from a0") {
    const auto data = scalar_set({1, 2, 3}, {0.0, 1.0, 0.5});
    CHECK(uniform_loss(act, scalar_model(0, 0), data) ==
          doctest::Approx(1.0 - oracle::kReluA0).epsilon(1e-15));
  }
  SUBCASE("three points by hand") {
    // outputs 1.25, 2.75, -1.75 against 0.5, 3, 1
    const auto data = scalar_set({1, 2, -1}, {0.5, 3.0, 1.0});
    CHECK(uniform_loss({0, 1, 1, 0}, scalar_model(1.5, -0.25), data) == 2.75);
  }
  SUBCASE("pole inside the data") {
    const auto data = scalar_set({0.0, 3.0}, {0.0, 0.0});
    CHECK_THROWS_AS(uniform_loss(act, scalar_model(1.0, 0.0), data), DomainError);
  }
  SUBCASE("permutation invariant") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(8, 2);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      x(i, 0) = g(rng);
      x(i, 1) = g(rng);
      y(i) = g(rng);
    }
    AffineModel m;
    m.weights = Eigen::Vector2d(0.2, -0.1);
    m.bias = 0.05;
    const double base = uniform_loss(act, m, SampleSet::create(x, y));
    std::array<std::size_t, 8> order{7, 3, 0, 5, 1, 6, 2, 4};
    const auto shuffled = SampleSet::create(x, y).subset(order);
    CHECK(uniform_loss(act, m, shuffled) == base);
  }
}

TEST_CASE("sample set validation") {
  CHECK_THROWS_AS(SampleSet::create(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)), DataError);
  CHECK_THROWS_AS(SampleSet::create(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(3)),
                  DataError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 1);
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampleSet::create(bad, Eigen::VectorXd::Zero(2)), DataError);
  CHECK_THROWS_AS(SampleSet::create(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2), {"a"}),
                  DataError);
}

TEST_CASE("activation and config validation") {
  CHECK_THROWS_AS(RationalActivation({0, 0, 0, 0}).validate(), ConfigError);
  CHECK(RationalActivation{2, 4, 2, -1}.normalised() == RationalActivation{1, 2, 1, -0.5});
  CHECK_THROWS_AS(RationalActivation({1, 1, -1, 0}).normalised(), DomainError);

  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate(4));
  cfg.grid.points = 3;
  CHECK_THROWS_AS(cfg.validate(4), ConfigError);
  cfg = {};
  cfg.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.grid.c = 1.0;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(cfg.validate(4), ConfigError);

  CHECK(parse_method("bisection") == Method::Bisection);
  CHECK(parse_method("diffcorr") == Method::DiffCorr);
  CHECK_THROWS_AS(parse_method("newton"), ConfigError);
}

TEST_CASE("quasiconvexity probe") {
  const auto act = oracle::relu_activation();
  const auto data = scalar_set({-1, -0.5, 0, 0.5, 1}, {0.2, -0.1, 0.4, 0.0, 0.3});
  const std::array<double, 5> lambdas{0, 0.25, 0.5, 0.75, 1};

  SUBCASE("degenerate segment") {
    const auto m = scalar_model(0.2, 0.1);
    CHECK(quasiconvexity_probe(act, data, m, m, lambdas));
  }
  SUBCASE("endpoint identity") {
    const auto m1 = scalar_model(0.4, -0.3);
    const auto m2 = scalar_model(-0.2, 0.5);
    CHECK(uniform_loss(act, convex_combination(m1, m2, 1.0), data) == uniform_loss(act, m1, data));
    CHECK(uniform_loss(act, convex_combination(m1, m2, 0.0), data) == uniform_loss(act, m2, data));
  }
  SUBCASE("lambda outside the unit interval") {
    const auto m = scalar_model(0, 0);
    const std::array<double, 1> bad{1.5};
    CHECK_THROWS_AS(quasiconvexity_probe(act, data, m, m, bad), ConfigError);
  }
  SUBCASE("random pairs, checked directly against the definition") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
      const RationalActivation a{unit(rng), unit(rng), 1.0, unit(rng)};
      const auto m1 = scalar_model(unit(rng), unit(rng));
      const auto m2 = scalar_model(unit(rng), unit(rng));
      double l1 = 0, l2 = 0;
      try {
        l1 = uniform_loss(a, m1, data);
        l2 = uniform_loss(a, m2, data);
      } catch (const DomainError&) {
        continue;
      }
      for (double lam : lambdas) {
        const double w = lam * m1.weights(0) + (1 - lam) * m2.weights(0);
        const double b = lam * m1.bias + (1 - lam) * m2.bias;
        oracle::ScalarInstance s{{-1, -0.5, 0, 0.5, 1}, {0.2, -0.1, 0.4, 0.0, 0.3}};
        REQUIRE(oracle::scalar_loss(a, s, w, b) <= std::max(l1, l2) + kQuasiconvexSlack);
      }
      REQUIRE(quasiconvexity_probe(a, data, m1, m2, lambdas));
      ++checked;
    }
  }
}

TEST_CASE("affine model stacking") {
  AffineModel m;
  m.weights = Eigen::Vector3d(1, 2, 3);
  m.bias = -4;
  const auto v = m.stacked();
  REQUIRE(v.size() == 4);
  CHECK(v(3) == -4);
  const auto back = AffineModel::from_stacked(v);
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
}

TEST_CASE("network problem matches direct evaluation") {
  const auto act = oracle::relu_activation();
  const auto data = scalar_set({-1, 0.25, 0.8}, {0.1, 0.2, 0.3});
  const auto prob = network_problem(act, data);
  Eigen::Vector2d v(0.3, -0.2);
  CHECK(prob.deviation(v) ==
        doctest::Approx(uniform_loss(act, scalar_model(0.3, -0.2), data)).epsilon(1e-14));
  const auto boxed = network_problem(act, data, true);
  CHECK((boxed.lower.array() == -1.0).all());
  CHECK((boxed.upper.array() == 1.0).all());
  CHECK(std::isinf(prob.upper(0)));
}
