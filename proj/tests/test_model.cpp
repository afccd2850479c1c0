#include "perf/model.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace perf;

TEST_CASE("predict_score basics") {
  LinearModel m = zero_model(3, Task::classification);
  CHECK(predict_score(m, Eigen::Vector3d(1, 2, 3)) == 0.0);

  m.weights = Eigen::Vector2d(1, 1).eval();
  CHECK(predict_score(m, Eigen::Vector2d(2, 3)) == 5.0);

  m.weights = Eigen::VectorXd::Constant(1, 0.5);
  m.intercept = -1.0;
  CHECK(predict_score(m, Eigen::VectorXd::Constant(1, 4.0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(predict_score(m, Eigen::Vector2d(1, 1)), std::invalid_argument);
}

TEST_CASE("pointwise_loss closed forms") {
  LabeledSample z;
  SUBCASE("squared loss exact fit") {
    LinearModel m = zero_model(0, Task::regression);
    m.intercept = 4.0;
    z.features = Eigen::VectorXd(0);
    z.target = 4.0;
    CHECK(pointwise_loss(m, z, {LossFamily::squared, 0.0}) == 0.0);
  }
  SUBCASE("logistic at zero score") {
    LinearModel m = zero_model(1, Task::classification);
    z.features = Eigen::VectorXd::Constant(1, 3.0);
    z.target = 1.0;
    CHECK(pointwise_loss(m, z, {LossFamily::logistic, 0.0}) == doctest::Approx(std::log(2.0)));
  }
  SUBCASE("regularizer adds lambda/2 |w|^2") {
    LinearModel m = zero_model(1, Task::classification);
    m.weights(0) = 1.0;
    z.features = Eigen::VectorXd::Constant(1, 0.0);  // keeps score 0
    z.target = 1.0;
    CHECK(pointwise_loss(m, z, {LossFamily::logistic, 2.0}) ==
          doctest::Approx(std::log(2.0) + 1.0));
  }
  SUBCASE("non-binary target rejected") {
    LinearModel m = zero_model(1, Task::classification);
    z.features = Eigen::VectorXd::Constant(1, 0.0);
    z.target = 0.5;
    CHECK_THROWS_AS(pointwise_loss(m, z, {LossFamily::logistic, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("pointwise_grad closed forms") {
  SUBCASE("squared at minimum") {
    LinearModel m = zero_model(0, Task::regression);
    m.intercept = 7.0;
    LabeledSample z{Eigen::VectorXd(0), 7.0, {}};
    CHECK(pointwise_grad(m, z, {LossFamily::squared, 0.0}).norm() == 0.0);
  }
  SUBCASE("logistic at zero score") {
    LinearModel m = zero_model(1, Task::classification);
    LabeledSample z{Eigen::VectorXd::Constant(1, 2.0), 1.0, {}};
    Eigen::VectorXd g = pointwise_grad(m, z, {LossFamily::logistic, 0.0});
    CHECK(g(0) == doctest::Approx(-1.0));
    CHECK(g(1) == doctest::Approx(-0.5));
  }
}

TEST_CASE("gradients match central finite differences (100 random cases each)") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 0.1);
  for (int family = 0; family < 2; ++family) {
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 1 + static_cast<int>(rng() % 5);
      const bool logistic = family == 0;
      LossKind loss{logistic ? LossFamily::logistic : LossFamily::squared,
                    logistic ? unif(rng) : 0.0};
      LinearModel m = testing::random_model(
          d, logistic ? Task::classification : Task::regression, rng);
      LabeledSample z;
      z.features = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
      z.target = logistic ? static_cast<double>(rng() % 2) : gauss(rng);
      const Eigen::VectorXd analytic = pointwise_grad(m, z, loss);
      const Eigen::VectorXd numeric = testing::numeric_grad(
          [&](const LinearModel& mm) { return pointwise_loss(mm, z, loss); }, m);
      CHECK(testing::rel_err(analytic, numeric) < 1e-5);
    }
  }
}

TEST_CASE("losses are non-negative; squared zero iff exact") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    LinearModel m = testing::random_model(3, Task::regression, rng);
    LabeledSample z;
    z.features = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    z.target = gauss(rng);
    const double sq = pointwise_loss(m, z, {LossFamily::squared, 0.0});
    CHECK(sq >= 0.0);
    CHECK((sq == 0.0) == (predict_score(m, z.features) == z.target));

    m.task = Task::classification;
    z.target = static_cast<double>(rng() % 2);
    CHECK(pointwise_loss(m, z, {LossFamily::logistic, 0.01}) >= 0.0);
  }
}

TEST_CASE("logistic loss with lambda > 0 is strongly convex in the weights") {
  // L(m') >= L(m) + <grad, delta> + (lambda/2)|w' - w|^2 on random pairs.
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const LossKind loss{LossFamily::logistic, 0.5};
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 3);
    LinearModel a = testing::random_model(d, Task::classification, rng);
    LinearModel b = testing::random_model(d, Task::classification, rng);
    LabeledSample z;
    z.features = Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return gauss(rng); });
    z.target = static_cast<double>(rng() % 2);
    const double la = pointwise_loss(a, z, loss);
    const double lb = pointwise_loss(b, z, loss);
    const Eigen::VectorXd ga = pointwise_grad(a, z, loss);
    Eigen::VectorXd delta(d + 1);
    delta.head(d) = b.weights - a.weights;
    delta(d) = b.intercept - a.intercept;
    const double quad = 0.5 * loss.lambda * (b.weights - a.weights).squaredNorm();
    CHECK(lb >= la + ga.dot(delta) + quad - 1e-9);
  }
}

TEST_CASE("sigmoid is stable for extreme scores") {
  CHECK(sigmoid(1000.0) == doctest::Approx(1.0));
  CHECK(sigmoid(-1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(log1p_exp(5000.0)));
  CHECK(log1p_exp(5000.0) == doctest::Approx(5000.0));
}

TEST_CASE("dataset invariants") {
  std::vector<LabeledSample> samples(2);
  samples[0] = {Eigen::Vector2d(1, 2), 1.0, std::string("A")};
  samples[1] = {Eigen::Vector2d(3, 4), 0.0, std::string("B")};
  Dataset d = make_dataset(samples, Task::classification);
  CHECK(d.n() == 2);
  CHECK(d.d() == 2);
  CHECK(d.has_groups());

  samples[1].features = Eigen::Vector3d(1, 2, 3);
  CHECK_THROWS_AS(make_dataset(samples, Task::classification), std::invalid_argument);

  samples[1].features = Eigen::Vector2d(1, 2);
  samples[1].group.reset();
  CHECK_THROWS_AS(make_dataset(samples, Task::classification), std::invalid_argument);

  samples[1].group = "B";
  samples[1].target = 0.7;
  CHECK_THROWS_AS(make_dataset(samples, Task::classification), std::invalid_argument);

  CHECK_THROWS_AS(make_dataset({}, Task::classification), std::invalid_argument);
}
