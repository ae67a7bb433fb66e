#pragma once

#include <cstdint>

#include "netoco/activation.hpp"
#include "netoco/tensor.hpp"

namespace netoco::neural {

enum class NormCheck { strict, lenient };

// Two-layer network with symmetric initialization. Slice i of theta is the
// m x p weight matrix for output coordinate i; rows r and r + m/2 start out
// identical, the frozen output signs of the second half are flipped, so the
// network outputs exactly zero at initialization.
//
//   f_i(theta[i]; x) = (1/b) * sum_r a_{i,r} [sigma(theta[i,r].x) -
//                                             sigma(theta[i,r+m/2].x)]
struct TwoLayerParams {
  int p = 0;  // input dimension
  int d = 0;  // output dimension
  int m = 0;  // hidden width, even
  double b = 1.0;
  Activation activation;
  Tensor theta;            // d slices of shape m x p (trainable)
  Eigen::MatrixXd signs;   // d x (m/2), entries +-1 (frozen first-half signs)
  Tensor theta1;           // initialization snapshot
  std::uint64_t seed = 0;
  std::string generator;
};

TwoLayerParams init_two_layer(int p, int d, int m, double b, std::uint64_t seed,
                              const Activation& act = Activation::tanh_act());

// Strict mode rejects inputs whose norm deviates from 1 by more than 1e-9;
// lenient proceeds. The exact zero vector is always admitted (zero-history
// policy inputs), and maps to the zero output for this architecture.
Eigen::VectorXd forward_two_layer(const TwoLayerParams& params, const Eigen::VectorXd& x,
                                  NormCheck check = NormCheck::strict);

// Gradient of <upstream, f(theta; x)> w.r.t. theta. With upstream = e_i the
// slice i equals (1/b) diag(a_i) sigma'(theta[i] x) x^T and all other slices
// are zero.
Tensor grad_two_layer(const TwoLayerParams& params, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& upstream, NormCheck check = NormCheck::strict);

// Full sign vector (a, -a) of length m for slice i.
Eigen::VectorXd full_signs(const TwoLayerParams& params, int i);

}  // namespace netoco::neural
