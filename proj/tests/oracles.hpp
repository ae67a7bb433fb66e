#pragma once

// Test-only oracles: independent straight-line re-implementations used to
// pin expected values. These must not call the library code paths they
// check.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "netoco/tensor.hpp"

namespace oracles {

// Two-layer forward pass written directly from the defining sum, scalar by
// scalar (no shared code with the library's vectorized evaluation).
inline double two_layer_forward_coord(const Eigen::MatrixXd& theta_slice,
                                      const Eigen::VectorXd& signs_half, double b,
                                      const Eigen::VectorXd& x,
                                      const std::function<double(double)>& sigma) {
  const int m = static_cast<int>(theta_slice.rows());
  const int half = m / 2;
  double acc = 0.0;
  for (int r = 0; r < half; ++r) {
    double z = 0.0, zbar = 0.0;
    for (int j = 0; j < x.size(); ++j) {
      z += theta_slice(r, j) * x(j);
      zbar += theta_slice(r + half, j) * x(j);
    }
    acc += signs_half(r) * sigma(z) + (-signs_half(r)) * sigma(zbar);
  }
  return acc / b;
}

// Closed-form Frobenius-ball projection applied slice by slice.
inline netoco::Tensor per_slice_projection(const netoco::Tensor& center, double radius,
                                           const netoco::Tensor& theta) {
  netoco::Tensor out = theta;
  for (std::size_t i = 0; i < theta.slices.size(); ++i) {
    const double dist = (theta.slices[i] - center.slices[i]).norm();
    if (dist > radius)
      out.slices[i] =
          center.slices[i] + (radius / dist) * (theta.slices[i] - center.slices[i]);
  }
  return out;
}

// Arc-cosine kernel: closed form of the ReLU NTK expectation,
// (x.y) * (pi - arccos(x.y)) / (2 pi) for unit x, y.
inline double relu_ntk_closed_form(double xy) {
  const double clamped = std::min(1.0, std::max(-1.0, xy));
  return xy * (M_PI - std::acos(clamped)) / (2.0 * M_PI);
}

// Plain recursive LTV simulator (the "second straight-line simulator").
struct LtvSim {
  std::vector<Eigen::MatrixXd> A, B;
  std::vector<Eigen::VectorXd> w;
  Eigen::VectorXd x1;

  std::vector<Eigen::VectorXd> roll(const std::vector<Eigen::VectorXd>& u) const {
    std::vector<Eigen::VectorXd> xs{x1};
    for (std::size_t k = 0; k < A.size(); ++k)
      xs.push_back(A[k] * xs.back() + B[k] * u[k] + w[k]);
    return xs;
  }
};

// Central finite differences of a scalar functional of a tensor coordinate.
inline double central_difference(const std::function<double(const netoco::Tensor&)>& f,
                                 netoco::Tensor at, std::size_t slice, int row, int col,
                                 double h) {
  netoco::Tensor hi = at, lo = at;
  hi.slices[slice](row, col) += h;
  lo.slices[slice](row, col) -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

// Exact minimizer of sum_t 0.5 (z - y_t)^2 over an interval.
inline double clamped_quadratic_argmin(const std::vector<double>& ys, double lo, double hi) {
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  return std::min(hi, std::max(lo, mean));
}

}  // namespace oracles
