#include <doctest.h>

#include <cmath>

#include "netoco/ball.hpp"
#include "netoco/experiments.hpp"
#include "netoco/oco.hpp"
#include "netoco/rng.hpp"
#include "oracles.hpp"

using namespace netoco;

namespace {

Tensor vec2(double a, double b) {
  Tensor t;
  Eigen::MatrixXd m(2, 1);
  m << a, b;
  t.slices.push_back(m);
  return t;
}

}  // namespace

TEST_CASE("projection: joint ball closed-form examples") {
  BallSet set(vec2(0.0, 0.0), 1.0, BallMode::joint);

  const Tensor outside = set.project(vec2(3.0, 4.0));
  CHECK(outside.slices[0](0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(outside.slices[0](1, 0) == doctest::Approx(0.8).epsilon(1e-15));

  const Tensor inside = set.project(vec2(0.1, 0.2));
  CHECK(inside.slices[0](0, 0) == 0.1);
  CHECK(inside.slices[0](1, 0) == 0.2);

  // Boundary points pass through the no-op branch untouched.
  const Tensor boundary = set.project(vec2(1.0, 0.0));
  CHECK(boundary.slices[0](0, 0) == 1.0);
}

TEST_CASE("projection: per-slice matches the slice-wise closed form") {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor center;
    center.slices.push_back(rng.normal_matrix(3, 2));
    center.slices.push_back(rng.normal_matrix(3, 2));
    const double radius = 0.5 + rng.uniform();
    BallSet set(center, radius, BallMode::per_slice);
    Tensor theta = center;
    theta.slices[0] += rng.normal_matrix(3, 2) * 2.0;  // push one slice outside
    theta.slices[1] += rng.normal_matrix(3, 2) * 0.1;
    const Tensor got = set.project(theta);
    const Tensor want = oracles::per_slice_projection(center, radius, theta);
    CHECK((got - want).frobenius_norm() <= 1e-12);
    CHECK(set.contains(got));
  }
}

TEST_CASE("projection: idempotent and optimal among in-set candidates") {
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor center;
    center.slices.push_back(rng.normal_matrix(4, 3));
    BallSet set(center, 1.0, BallMode::joint);
    const Tensor theta = center + Tensor{{rng.normal_matrix(4, 3)}} * (2.0 * rng.uniform());
    const Tensor proj = set.project(theta);
    CHECK((set.project(proj) - proj).frobenius_norm() <= 1e-12);
    const Tensor candidate = set.sample_uniform(rng);
    CHECK((proj - theta).frobenius_norm() <=
          (candidate - theta).frobenius_norm() + 1e-12);
  }
}

TEST_CASE("ogd_step: scalar examples") {
  // zero gradient is a fixed point
  {
    BallSet set(Tensor::scalar(0.0), 10.0, BallMode::joint);
    auto state = oco::OcoState::ogd(Tensor::scalar(0.0), set, 1.0);
    state.step(Tensor::scalar(0.0));
    CHECK(state.iterate().slices[0](0, 0) == 0.0);
    CHECK(state.round() == 2);
  }
  // t = 4: step is eta0 / sqrt(4) = 1/2
  {
    BallSet set(Tensor::scalar(0.0), 10.0, BallMode::joint);
    auto state = oco::OcoState::ogd(Tensor::scalar(0.0), set, 1.0);
    state.step(Tensor::scalar(0.0));
    state.step(Tensor::scalar(0.0));
    state.step(Tensor::scalar(0.0));
    REQUIRE(state.round() == 4);
    state.step(Tensor::scalar(1.0));
    CHECK(state.iterate().slices[0](0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  }
  // projection clips to the boundary
  {
    BallSet set(Tensor::scalar(0.0), 2.0, BallMode::joint);
    auto state = oco::OcoState::ogd(Tensor::scalar(0.0), set, 100.0);
    state.step(Tensor::scalar(1.0));
    CHECK(state.iterate().slices[0](0, 0) == doctest::Approx(-2.0).epsilon(1e-15));
  }
}

TEST_CASE("ogd_step: nonfinite gradients abort") {
  BallSet set(Tensor::scalar(0.0), 1.0, BallMode::joint);
  auto state = oco::OcoState::ogd(Tensor::scalar(0.0), set, 1.0);
  CHECK_THROWS_AS(state.step(Tensor::scalar(std::nan(""))), oco::NumericalError);
  CHECK_THROWS_AS(state.step(Tensor::scalar(INFINITY)), oco::NumericalError);
}

TEST_CASE("adagrad_step: first step moves by -g/(|g| + eps) per coordinate") {
  BallSet set(vec2(0.0, 0.0), 100.0, BallMode::joint);
  auto state = oco::OcoState::adagrad(vec2(0.0, 0.0), set, 1.0);
  state.step(vec2(3.0, -0.5));
  CHECK(state.iterate().slices[0](0, 0) ==
        doctest::Approx(-3.0 / (3.0 + 1e-8)).epsilon(1e-12));
  CHECK(state.iterate().slices[0](1, 0) ==
        doctest::Approx(0.5 / (0.5 + 1e-8)).epsilon(1e-12));

  // zero gradient: iterate unchanged
  const Tensor before = state.iterate();
  state.step(vec2(0.0, 0.0));
  CHECK((state.iterate() - before).frobenius_norm() == 0.0);
}

TEST_CASE("adagrad_step: repeated identical gradients shrink the displacement") {
  BallSet set(Tensor::scalar(0.0), 1e9, BallMode::joint);
  auto state = oco::OcoState::adagrad(Tensor::scalar(0.0), set, 1.0);
  state.step(Tensor::scalar(2.0));
  const double first = std::abs(state.iterate().slices[0](0, 0));
  const double after_first = state.iterate().slices[0](0, 0);
  state.step(Tensor::scalar(2.0));
  const double second = std::abs(state.iterate().slices[0](0, 0) - after_first);
  CHECK(second < first);
}

TEST_CASE("run_nearly_convex: single round records the played loss") {
  BallSet set(Tensor::scalar(0.0), 2.0, BallMode::joint);
  std::vector<oco::LossOracle> losses{[](const Tensor& theta) {
    const double z = theta.slices[0](0, 0);
    oco::LossSample s;
    s.value = (z - 1.0) * (z - 1.0);
    s.grad = Tensor::scalar(2.0 * (z - 1.0));
    return s;
  }};
  const auto outcome =
      oco::run_nearly_convex(oco::OcoState::ogd(Tensor::scalar(0.0), set, 1.0), losses);
  REQUIRE(outcome.ok());
  REQUIRE(outcome.trace.rounds() == 1);
  CHECK(outcome.trace.rows[0].loss == 1.0);
}

TEST_CASE("run_nearly_convex: oracle failure truncates the trace at t-1") {
  BallSet set(Tensor::scalar(0.0), 2.0, BallMode::joint);
  std::vector<oco::LossOracle> losses;
  for (int t = 0; t < 5; ++t)
    losses.push_back([t](const Tensor&) {
      if (t == 3) throw std::runtime_error("boom");
      oco::LossSample s;
      s.value = 1.0;
      s.grad = Tensor::scalar(0.0);
      return s;
    });
  const auto outcome =
      oco::run_nearly_convex(oco::OcoState::ogd(Tensor::scalar(0.0), set, 1.0), losses);
  CHECK_FALSE(outcome.ok());
  CHECK(outcome.failed_round == 4);
  CHECK(outcome.trace.rounds() == 3);
}

TEST_CASE("OGD regret on the convex quadratic stream stays below 3RG sqrt(T)") {
  // l_t(z) = (z - 1)^2 / 2 on [-2, 2]: R = 2, G = 3, comparator z* = 1.
  const int T = 400;
  const double R = 2.0, G = 3.0;
  BallSet set(Tensor::scalar(0.0), R, BallMode::joint);
  std::vector<oco::LossOracle> losses;
  for (int t = 0; t < T; ++t)
    losses.push_back([](const Tensor& theta) {
      const double z = theta.slices[0](0, 0);
      oco::LossSample s;
      s.value = 0.5 * (z - 1.0) * (z - 1.0);
      s.grad = Tensor::scalar(z - 1.0);
      return s;
    });
  const auto outcome = oco::run_nearly_convex(
      oco::OcoState::ogd(Tensor::scalar(0.0), set, 2.0 * R / G), losses);
  REQUIRE(outcome.ok());
  const double comparator_total = 0.0;  // z* = 1 has zero loss each round
  const double regret = outcome.trace.rows.back().cum_loss - comparator_total;
  CHECK(regret >= 0.0);
  CHECK(regret <= 3.0 * R * G * std::sqrt(static_cast<double>(T)));
}

TEST_CASE("verify_nearly_convex: convex passes at eps=0, concave fails") {
  Tensor center = vec2(0.0, 0.0);
  BallSet set(center, 1.0, BallMode::joint);
  oco::LossOracle convex = [](const Tensor& theta) {
    oco::LossSample s;
    s.value = theta.squared_norm();
    s.grad = theta * 2.0;
    return s;
  };
  const auto ok = oco::verify_nearly_convex(convex, set, 0.0, 200, 7);
  CHECK(ok.pass);
  CHECK(ok.max_violation <= 1e-8);

  oco::LossOracle concave = [](const Tensor& theta) {
    oco::LossSample s;
    s.value = -theta.squared_norm();
    s.grad = theta * -2.0;
    return s;
  };
  const auto bad = oco::verify_nearly_convex(concave, set, 0.0, 200, 7);
  CHECK_FALSE(bad.pass);
  // For the concave quadratic the violation equals ||x - y||^2 exactly.
  const double gap = (bad.worst_x - bad.worst_y).squared_norm();
  CHECK(bad.max_violation == doctest::Approx(gap).epsilon(1e-9));
}

TEST_CASE("shape mismatches are rejected as malformed calls") {
  BallSet set(vec2(0.0, 0.0), 1.0, BallMode::joint);
  CHECK_THROWS_AS(set.project(Tensor::scalar(1.0)), std::invalid_argument);
  CHECK_FALSE(set.contains(Tensor::scalar(0.0)));

  auto state = oco::OcoState::ogd(vec2(0.0, 0.0), set, 1.0);
  CHECK_THROWS_AS(state.step(Tensor::scalar(1.0)), std::invalid_argument);

  CHECK_THROWS_AS(BallSet(vec2(0.0, 0.0), -1.0, BallMode::joint), std::invalid_argument);
}

TEST_CASE("regret on the certified nearly-convex family obeys the margin bound") {
  // Small instance of the certified-stream regret decomposition; the
  // acceptance suite runs the full-size version.
  const int T = 100;
  const double R = 2.0;
  const auto family = harness::make_synthetic_family(R, 0.05, 6.0, T, 4242);
  const auto cert = harness::certify_synthetic(family, 801);
  std::vector<oco::LossOracle> losses;
  for (int t = 0; t < T; ++t) losses.push_back(family.oracle(t));
  BallSet set(Tensor::scalar(0.0), R, BallMode::joint);
  const double G = cert.gradient_bound;
  const auto outcome = oco::run_nearly_convex(
      oco::OcoState::ogd(Tensor::scalar(0.0), set, 2.0 * R / G), losses);
  REQUIRE(outcome.ok());

  const int n = 2001;
  const double h = 2.0 * R / (n - 1);
  double grid_min = 1e300;
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int t = 0; t < T; ++t) total += family.value(t, -R + i * h);
    grid_min = std::min(grid_min, total);
  }
  const double regret =
      outcome.trace.rows.back().cum_loss - (grid_min - T * G * h / 2.0);
  CHECK(regret <= 3.0 * R * G * std::sqrt(static_cast<double>(T)) + cert.epsilon * T);
}

TEST_CASE("regret trace: prefix sums and comparator columns") {
  oco::RegretTrace trace;
  trace.append_loss(1.5);
  trace.append_loss(0.5);
  trace.append_loss(2.0);
  CHECK(trace.rows[2].cum_loss == doctest::Approx(4.0));
  trace.set_comparator({1.0, 2.0, 3.0});
  CHECK(trace.rows[1].regret == doctest::Approx(0.0));
  CHECK(trace.rows[2].regret == doctest::Approx(1.0));
  CHECK(trace.rows[2].avg_regret == doctest::Approx(1.0 / 3.0));
}
