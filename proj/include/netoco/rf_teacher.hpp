#pragma once

#include <cstdint>
#include <filesystem>

#include "netoco/activation.hpp"
#include "netoco/tensor.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::rf {

// Finite random-feature target function, one independent feature/coefficient
// set per output coordinate:
//
//   g_i(x) = sum_r c[i].row(r) . x * sigma'(w[i].row(r) . x)
//
// The declared RF-norm bound D caps every coefficient at ||c_r|| <= 2D/m_rf.
// The shipped sampler stays within D/m_rf so that the width-2*m_rf network
// carrying this function sits inside the b*D*sqrt(d)/sqrt(m) ball around its
// initialization (the cap alone would allow twice that radius).
struct RfTeacher {
  int p = 0;
  int d = 0;
  int m_rf = 0;
  double D = 0.0;
  neural::Activation activation;  // only sigma' is used
  Tensor w;                       // d slices of shape m_rf x p
  Tensor c;                       // d slices of shape m_rf x p
  std::uint64_t seed = 0;
  std::string generator;

  // Throws if any coefficient row exceeds the declared cap.
  void validate() const;
};

// Gaussian features; coefficient rows have norm rho * D / m_rf with rho
// uniform in [0, 1] and a uniformly random direction.
RfTeacher sample_teacher(int p, int d, double D, int m_rf, std::uint64_t seed,
                         const neural::Activation& act = neural::Activation::tanh_act());

// Teacher whose features coincide with the student's first m/2 init rows,
// so the constructive width-m network representation is exact. Coefficients
// are sampled as in sample_teacher.
RfTeacher aligned_teacher(const neural::TwoLayerParams& student, double D,
                          std::uint64_t seed);

Eigen::VectorXd eval_teacher(const RfTeacher& teacher, const Eigen::VectorXd& x,
                             neural::NormCheck check = neural::NormCheck::strict);

void save_teacher(const std::filesystem::path& path, const RfTeacher& teacher);
RfTeacher load_teacher(const std::filesystem::path& path);

struct NtkEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

// Monte-Carlo estimate of K_sigma(x, y) = E_w <x sigma'(w.x), y sigma'(w.y)>
// over w ~ N(0, I_p), with the plain sample standard error.
NtkEstimate ntk_estimate(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const neural::Activation& act, int n_samples,
                         std::uint64_t seed);

}  // namespace netoco::rf
