#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "netoco/activation.hpp"
#include "netoco/ball.hpp"
#include "netoco/deep_net.hpp"
#include "netoco/params_io.hpp"
#include "netoco/rng.hpp"
#include "netoco/theory.hpp"
#include "netoco/two_layer.hpp"
#include "oracles.hpp"

using namespace netoco;
using namespace netoco::neural;

TEST_CASE("activation: tanh satisfies the C=1 derivative bounds on a dense grid") {
  const auto check = check_smoothness(Activation::tanh_act());
  CHECK(check.pass);
  CHECK(check.max_abs_deriv <= 1.0);
  CHECK(check.max_lipschitz_ratio <= 1.0);
}

TEST_CASE("activation: registry round-trip and unknown names") {
  Activation::register_activation(
      "softplus_like", 1.0, true, [](double z) { return std::log1p(std::exp(z)); },
      [](double z) { return 1.0 / (1.0 + std::exp(-z)); });
  const auto act = Activation::by_name("softplus_like");
  CHECK(act.C == 1.0);
  CHECK(check_smoothness(act).pass);
  CHECK_THROWS_AS(Activation::by_name("nope"), std::invalid_argument);
}

TEST_CASE("init_two_layer: symmetric structure and zero output") {
  CHECK_THROWS_AS(init_two_layer(3, 1, 5, 1.0, 1), std::invalid_argument);  // odd m

  const auto params = init_two_layer(6, 3, 8, 2.0, 42);
  // mirrored rows at init
  for (int i = 0; i < params.d; ++i)
    for (int r = 0; r < params.m / 2; ++r)
      CHECK((params.theta1.slices[i].row(r) - params.theta1.slices[i].row(r + params.m / 2))
                .norm() == 0.0);
  // signs are +-1
  for (int i = 0; i < params.d; ++i) {
    for (int r = 0; r < params.m / 2; ++r)
      CHECK(std::abs(params.signs(i, r)) == 1.0);
    const Eigen::VectorXd a = full_signs(params, i);
    for (int r = 0; r < params.m / 2; ++r) CHECK(a(r) == -a(r + params.m / 2));
  }

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = rng.unit_vector(params.p);
    CHECK(forward_two_layer(params, x).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // determinism
  const auto again = init_two_layer(6, 3, 8, 2.0, 42);
  CHECK(again.theta == params.theta);
  CHECK(again.signs.cwiseEqual(params.signs).all());

  // m = 2, d = 1: the two rows coincide
  const auto tiny = init_two_layer(4, 1, 2, 1.0, 3);
  CHECK((tiny.theta1.slices[0].row(0) - tiny.theta1.slices[0].row(1)).norm() == 0.0);
}

TEST_CASE("forward_two_layer: hand example tanh(1) - tanh(0)") {
  TwoLayerParams params;
  params.p = 1;
  params.d = 1;
  params.m = 2;
  params.b = 1.0;
  params.activation = Activation::tanh_act();
  Eigen::MatrixXd slice(2, 1);
  slice << 1.0, 0.0;  // theta[1,1] = 1, mirrored row 0
  params.theta.slices.push_back(slice);
  params.theta1 = params.theta;
  params.signs.resize(1, 1);
  params.signs(0, 0) = 1.0;

  Eigen::VectorXd x(1);
  x << 1.0;
  const double got = forward_two_layer(params, x)(0);
  CHECK(got == doctest::Approx(0.7615941559557649).epsilon(1e-12));
  // independent straight-line evaluation
  const double want = oracles::two_layer_forward_coord(
      slice, params.signs.row(0).transpose(), 1.0, x, [](double z) { return std::tanh(z); });
  CHECK(got == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("forward_two_layer: strict mode rejects non-unit inputs") {
  const auto params = init_two_layer(4, 1, 4, 1.0, 5);
  Eigen::VectorXd bad(4);
  bad << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(forward_two_layer(params, bad, NormCheck::strict), std::invalid_argument);
  CHECK_NOTHROW(forward_two_layer(params, bad, NormCheck::lenient));
}

TEST_CASE("forward_two_layer: generic perturbations break the zero-output symmetry") {
  auto params = init_two_layer(5, 2, 6, 2.0, 11);
  Rng rng(12);
  const Eigen::VectorXd x = rng.unit_vector(params.p);

  // mirror-compatible perturbation keeps f = 0
  auto sym = params;
  for (int i = 0; i < params.d; ++i) {
    const Eigen::MatrixXd delta = rng.normal_matrix(params.m / 2, params.p);
    sym.theta.slices[i].topRows(params.m / 2) += delta;
    sym.theta.slices[i].bottomRows(params.m / 2) += delta;
  }
  CHECK(forward_two_layer(sym, x).cwiseAbs().maxCoeff() <= 1e-12);

  // generic perturbation does not
  auto gen = params;
  gen.theta.slices[0] += rng.normal_matrix(params.m, params.p);
  const Eigen::VectorXd f = forward_two_layer(gen, x);
  CHECK(f.cwiseAbs().maxCoeff() > 1e-6);
  // cross-check against the straight-line oracle
  for (int i = 0; i < params.d; ++i) {
    const double want = oracles::two_layer_forward_coord(
        gen.theta.slices[i], gen.signs.row(i).transpose(), gen.b, x,
        [](double z) { return std::tanh(z); });
    CHECK(f(i) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("grad_two_layer: slice structure, norm bound, Lipschitz, finite differences") {
  auto params = init_two_layer(8, 2, 64, 8.0, 21);
  Rng rng(22);
  const double R = 2.0;
  BallSet ball(params.theta1, R, BallMode::joint);
  const double C = params.activation.C;

  // e_i upstream touches only slice i
  {
    const Eigen::VectorXd x = rng.unit_vector(params.p);
    const Tensor g = grad_two_layer(params, x, Eigen::VectorXd::Unit(params.d, 1));
    CHECK(g.slices[0].norm() == 0.0);
    CHECK(g.slices[1].norm() > 0.0);
  }

  double worst_norm = 0.0, worst_lip = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = rng.unit_vector(params.p);
    params.theta = ball.sample_uniform(rng);
    const Tensor theta_b = ball.sample_uniform(rng);
    for (int i = 0; i < params.d; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(params.d, i);
      const Tensor ga = grad_two_layer(params, x, e);
      worst_norm = std::max(worst_norm, ga.slices[i].norm());
      auto params_b = params;
      params_b.theta = theta_b;
      const Tensor gb = grad_two_layer(params_b, x, e);
      const double dist = (params.theta.slices[i] - theta_b.slices[i]).norm();
      if (dist > 1e-9)
        worst_lip = std::max(worst_lip, (ga.slices[i] - gb.slices[i]).norm() / dist);
    }
  }
  CHECK(worst_norm <= std::sqrt(static_cast<double>(params.m)) * C / params.b);
  CHECK(worst_lip <= C / params.b);

  // finite differences on 50 random coordinates of a composed loss
  params.theta = ball.sample_uniform(rng);
  const Eigen::VectorXd x = rng.unit_vector(params.p);
  const Eigen::VectorXd y = rng.normal_vector(params.d);
  auto loss = [&](const Tensor& theta) {
    auto nn = params;
    nn.theta = theta;
    return 0.5 * (forward_two_layer(nn, x) - y).squaredNorm();
  };
  const Tensor analytic = grad_two_layer(params, x, forward_two_layer(params, x) - y);
  for (int trial = 0; trial < 50; ++trial) {
    const int i = static_cast<int>(rng.raw() % params.d);
    const int r = static_cast<int>(rng.raw() % params.m);
    const int cidx = static_cast<int>(rng.raw() % params.p);
    const double fd = oracles::central_difference(loss, params.theta, i, r, cidx, 1e-5);
    const double denom = std::max(std::abs(fd), 1e-8);
    CHECK(std::abs(analytic.slices[i](r, cidx) - fd) / denom <= 1e-4);
  }
}

TEST_CASE("forward_deep: tiny hand examples and ReLU gating") {
  DeepParams params;
  params.p = 1;
  params.d = 1;
  params.m = 1;
  params.H = 1;
  params.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
  params.a = Eigen::MatrixXd::Constant(1, 1, 3.0);
  params.theta.slices.push_back(Eigen::MatrixXd::Constant(1, 1, 2.0));
  params.theta1 = params.theta;

  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK(forward_deep(params, x)(0) == doctest::Approx(6.0));

  params.theta.slices[0](0, 0) = -2.0;
  CHECK(forward_deep(params, x)(0) == 0.0);

  // gradient of the positive branch: 3 * 1{2>0} * x0 = 3
  params.theta.slices[0](0, 0) = 2.0;
  const Tensor g = grad_deep(params, x, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(g.slices[0](0, 0) == doctest::Approx(3.0));
}

TEST_CASE("grad_deep: finite differences away from kinks") {
  auto params = init_deep(6, 2, 32, 3, 31);
  Rng rng(32);
  BallSet ball(params.theta1, 0.3, BallMode::per_slice);
  int accepted = 0;
  while (accepted < 50) {
    params.theta = ball.sample_uniform(rng);
    const Eigen::VectorXd x = rng.unit_vector(params.p);
    if (min_abs_preactivation(params, x) < 1e-3) continue;
    const Eigen::VectorXd y = rng.normal_vector(params.d);
    auto loss = [&](const Tensor& theta) {
      auto nn = params;
      nn.theta = theta;
      return 0.5 * (forward_deep(nn, x) - y).squaredNorm();
    };
    const Tensor analytic = grad_deep(params, x, forward_deep(params, x) - y);
    const int i = static_cast<int>(rng.raw() % params.d);
    const int r = static_cast<int>(rng.raw() % (params.H * params.m));
    const int cidx = static_cast<int>(rng.raw() % params.m);
    const double fd = oracles::central_difference(loss, params.theta, i, r, cidx, 1e-5);
    const double got = analytic.slices[i](r, cidx);
    if (std::abs(fd) < 1e-7 && std::abs(got) < 1e-7) continue;  // inactive path
    CHECK(std::abs(got - fd) / std::max(std::abs(fd), 1e-8) <= 1e-4);
    ++accepted;
  }
}

TEST_CASE("deep net: frozen blocks never change under updates") {
  auto params = init_deep(4, 2, 16, 2, 41);
  const auto before = frozen_checksum(params);
  Rng rng(42);
  BallSet ball(params.theta1, 0.5, BallMode::per_slice);
  for (int step = 0; step < 20; ++step) params.theta = ball.sample_uniform(rng);
  CHECK(frozen_checksum(params) == before);
}

TEST_CASE("theory_constants: two-layer arithmetic instance and homogeneity in b") {
  const auto params = init_two_layer(8, 2, 256, 16.0, 51);
  const auto tc = theory_constants_two_layer(params, 1.0, 2.0);
  CHECK(tc.nc_margin == doctest::Approx(0.5));
  CHECK(tc.gradient_bound == doctest::Approx(1.0));
  CHECK(tc.eta0 == doctest::Approx(4.0));
  CHECK(tc.exact);

  // R = 0 degenerates
  const auto zero = theory_constants_two_layer(params, 1.0, 0.0);
  CHECK(zero.nc_margin == 0.0);
  CHECK(zero.eta0 == 0.0);

  // doubling b halves eps and G, doubles eta0
  auto wide = params;
  wide.b = 32.0;
  const auto tc2 = theory_constants_two_layer(wide, 1.0, 2.0);
  CHECK(tc2.nc_margin == doctest::Approx(tc.nc_margin / 2.0));
  CHECK(tc2.gradient_bound == doctest::Approx(tc.gradient_bound / 2.0));
  CHECK(tc2.eta0 == doctest::Approx(tc.eta0 * 2.0));

  // recommended radius D sqrt(d)
  const auto with_D = theory_constants_two_layer(params, 1.0, 2.0, 1.5);
  CHECK(with_D.recommended_radius == doctest::Approx(1.5 * std::sqrt(2.0)));

  // deep schedule eta0 = 2R/(L H sqrt(m))
  const auto deep = init_deep(4, 1, 16, 2, 52);
  const auto dc = theory_constants_deep(deep, 2.0, 0.5);
  CHECK(dc.eta0 == doctest::Approx(2.0 * 0.5 / (2.0 * 2.0 * 4.0)));
  CHECK_FALSE(dc.exact);
}

TEST_CASE("params serialization: bitwise round-trip for both architectures") {
  const auto dir = std::filesystem::temp_directory_path();
  {
    auto params = init_two_layer(5, 3, 8, 3.5, 61);
    Rng rng(62);
    params.theta.slices[1] += rng.normal_matrix(8, 5);  // drift from init
    const auto path = dir / "netoco_test_two_layer.bin";
    save_params(path, params);
    const auto back = load_two_layer(path);
    CHECK(back.theta == params.theta);
    CHECK(back.theta1 == params.theta1);
    CHECK(back.signs.cwiseEqual(params.signs).all());
    CHECK(back.b == params.b);
    CHECK(back.m == params.m);
    CHECK(back.seed == params.seed);
    CHECK(back.generator == params.generator);
    std::filesystem::remove(path);
  }
  {
    auto params = init_deep(4, 2, 8, 3, 63);
    const auto path = dir / "netoco_test_deep.bin";
    save_params(path, params);
    const auto back = load_deep(path);
    CHECK(back.theta == params.theta);
    CHECK(back.A.cwiseEqual(params.A).all());
    CHECK(back.a.cwiseEqual(params.a).all());
    CHECK(back.H == params.H);
    std::filesystem::remove(path);
  }
}
