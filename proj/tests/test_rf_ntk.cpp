#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "netoco/rf_teacher.hpp"
#include "netoco/rng.hpp"
#include "oracles.hpp"

using namespace netoco;
using namespace netoco::rf;

TEST_CASE("sample_teacher: determinism, zero D, coefficient cap") {
  const auto a = sample_teacher(6, 2, 1.0, 8, 99);
  const auto b = sample_teacher(6, 2, 1.0, 8, 99);
  CHECK(a.w == b.w);
  CHECK(a.c == b.c);

  const auto zero = sample_teacher(6, 2, 0.0, 8, 7);
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial)
    CHECK(eval_teacher(zero, rng.unit_vector(6)).cwiseAbs().maxCoeff() == 0.0);

  // coefficient rows respect the declared 2D/m_rf cap (sampler stays at half)
  for (int i = 0; i < a.d; ++i)
    for (int r = 0; r < a.m_rf; ++r)
      CHECK(a.c.slices[i].row(r).norm() <= 2.0 * a.D / a.m_rf + 1e-12);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("eval_teacher: single-feature hand evaluation") {
  // m_rf = 1, c_1 = (2D, 0, ..., 0), x = e_1: g(x) = 2D tanh'(w_1[1])
  const double D = 0.75;
  RfTeacher teacher;
  teacher.p = 4;
  teacher.d = 1;
  teacher.m_rf = 1;
  teacher.D = D;
  teacher.activation = neural::Activation::tanh_act();
  Rng rng(123);
  teacher.w.slices.push_back(rng.normal_matrix(1, 4));
  Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(1, 4);
  c1(0, 0) = 2.0 * D;  // exactly at the declared cap
  teacher.c.slices.push_back(c1);
  CHECK_NOTHROW(teacher.validate());

  const Eigen::VectorXd x = Eigen::VectorXd::Unit(4, 0);
  const double w11 = teacher.w.slices[0](0, 0);
  const double t = std::tanh(w11);
  const double want = 2.0 * D * (1.0 - t * t);
  CHECK(eval_teacher(teacher, x)(0) == doctest::Approx(want).epsilon(1e-14));

  // a row over the cap is rejected
  teacher.c.slices[0](0, 0) = 2.0 * D + 0.1;
  CHECK_THROWS_AS(teacher.validate(), std::invalid_argument);
}

TEST_CASE("eval_teacher: linear in the coefficients") {
  const auto teacher = sample_teacher(5, 3, 1.2, 6, 17);
  auto scaled = teacher;
  const double lambda = -1.75;
  for (auto& slice : scaled.c.slices) slice *= lambda;
  scaled.D = std::abs(lambda) * teacher.D;
  Rng rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = rng.unit_vector(5);
    CHECK((eval_teacher(scaled, x) - lambda * eval_teacher(teacher, x)).norm() <= 1e-12);
  }
}

TEST_CASE("aligned_teacher: features coincide with the student's init rows") {
  const auto student = neural::init_two_layer(6, 2, 16, 4.0, 33);
  const auto teacher = aligned_teacher(student, 1.0, 34);
  CHECK(teacher.m_rf == 8);
  for (int i = 0; i < 2; ++i)
    CHECK((teacher.w.slices[i] - student.theta1.slices[i].topRows(8)).norm() == 0.0);
}

TEST_CASE("teacher serialization: bitwise round-trip with validation") {
  const auto teacher = sample_teacher(4, 2, 0.9, 5, 55);
  const auto path = std::filesystem::temp_directory_path() / "netoco_test_teacher.bin";
  save_teacher(path, teacher);
  const auto back = load_teacher(path);
  CHECK(back.w == teacher.w);
  CHECK(back.c == teacher.c);
  CHECK(back.D == teacher.D);
  CHECK(back.m_rf == teacher.m_rf);
  CHECK(back.activation.name == teacher.activation.name);
  std::filesystem::remove(path);
}

TEST_CASE("ntk_estimate: ReLU self-kernel is 1/2 and orthogonal pairs are 0") {
  Rng rng(77);
  const Eigen::VectorXd x = rng.unit_vector(6);
  const auto self = ntk_estimate(x, x, neural::Activation::relu_act(), 100000, 78);
  CHECK(std::abs(self.value - 0.5) <= 3.0 * self.std_error);

  // orthogonal inputs: the (x.y) prefactor forces 0 exactly
  Eigen::VectorXd y = rng.unit_vector(6);
  y -= y.dot(x) * x;
  y.normalize();
  const auto ortho = ntk_estimate(x, y, neural::Activation::relu_act(), 1000, 79);
  CHECK(std::abs(ortho.value) <= 1e-12);
  CHECK(ortho.std_error <= 1e-12);
}

TEST_CASE("ntk_estimate: matches the arc-cosine closed form at x.y = 1/2") {
  // Unit vectors with inner product exactly 1/2.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4), y = Eigen::VectorXd::Zero(4);
  x(0) = 1.0;
  y(0) = 0.5;
  y(1) = std::sqrt(3.0) / 2.0;
  const auto est = ntk_estimate(x, y, neural::Activation::relu_act(), 100000, 80);
  const double want = oracles::relu_ntk_closed_form(0.5);
  CHECK(want == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(est.value - want) <= 3.0 * est.std_error);
}

TEST_CASE("ntk_estimate: symmetric under argument swap with shared draws") {
  Rng rng(81);
  const Eigen::VectorXd x = rng.unit_vector(5);
  const Eigen::VectorXd y = rng.unit_vector(5);
  const auto a = ntk_estimate(x, y, neural::Activation::tanh_act(), 500, 82);
  const auto b = ntk_estimate(y, x, neural::Activation::tanh_act(), 500, 82);
  CHECK(a.value == b.value);
}
