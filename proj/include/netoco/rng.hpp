#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace netoco {

// Identity string recorded in run metadata and serialized containers.
// Streams are reproducible across runs of the same build; cross-build
// bitwise agreement is not promised.
inline constexpr const char* kGeneratorId = "mt19937_64/boxmuller-v1";

// Stable 64-bit hash used to derive component sub-seeds from a master seed.
// Adding a new component name never perturbs the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component);

// Seedable generator with explicitly specified output transforms, so the
// produced streams do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (one value per call, second cached).
  double normal();
  // +1 or -1 with equal probability.
  double sign();
  std::uint64_t raw() { return engine_(); }

  Eigen::VectorXd normal_vector(Eigen::Index n);
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  // Uniform on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace netoco
