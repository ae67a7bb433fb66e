#pragma once

#include <cstdint>

#include "netoco/tensor.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::neural {

// Depth-H ReLU network, one scalar-output subnetwork per output coordinate:
//
//   x^0 = A xbar,  x^h = relu(theta^h x^{h-1}),  f_i = a_i . x^H
//
// The input matrix A (m x p) is shared across coordinates; the output
// vectors a_i and the layer stacks theta[i] are independent per coordinate.
// Slice i of theta stacks the H layer matrices vertically: rows
// [h*m, (h+1)*m) hold theta^{h+1}, giving an (H*m) x m slice. A and a are
// frozen after initialization.
struct DeepParams {
  int p = 0;
  int d = 0;
  int m = 0;
  int H = 1;
  Eigen::MatrixXd A;      // m x p, frozen, entries N(0, 2/m)
  Eigen::MatrixXd a;      // d x m, frozen, entries N(0, 1)
  Tensor theta;           // d slices of shape (H*m) x m, entries N(0, 2/m)
  Tensor theta1;          // initialization snapshot
  std::uint64_t seed = 0;
  std::string generator;

  Eigen::Block<const Eigen::MatrixXd> layer(int i, int h) const {
    return theta.slices[i].block(h * m, 0, m, m);
  }
};

DeepParams init_deep(int p, int d, int m, int H, std::uint64_t seed);

Eigen::VectorXd forward_deep(const DeepParams& params, const Eigen::VectorXd& x,
                             NormCheck check = NormCheck::strict);

// Reverse-mode gradient of <upstream, f(theta; x)> w.r.t. theta, with the
// subgradient convention relu'(0) = 0.
Tensor grad_deep(const DeepParams& params, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& upstream, NormCheck check = NormCheck::strict);

// Checksum over the frozen A and a payload bits; unchanged across updates.
std::uint64_t frozen_checksum(const DeepParams& params);

// Smallest absolute preactivation reached anywhere in the forward pass;
// gradient tests filter points near ReLU kinks with this.
double min_abs_preactivation(const DeepParams& params, const Eigen::VectorXd& x);

}  // namespace netoco::neural
