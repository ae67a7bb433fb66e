#include "netoco/two_layer.hpp"

#include <stdexcept>

#include "netoco/rng.hpp"

namespace netoco::neural {

namespace {

void check_input(const TwoLayerParams& params, const Eigen::VectorXd& x, NormCheck check) {
  if (x.size() != params.p) throw std::invalid_argument("input dimension mismatch");
  if (check == NormCheck::strict) {
    const double nrm = x.norm();
    if (nrm != 0.0 && std::abs(nrm - 1.0) > 1e-9)
      throw std::invalid_argument("input is not unit norm (strict mode)");
  }
}

}  // namespace

TwoLayerParams init_two_layer(int p, int d, int m, double b, std::uint64_t seed,
                              const Activation& act) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("hidden width m must be even and >= 2");
  if (b <= 0.0) throw std::invalid_argument("scaling factor b must be positive");
  if (p < 1 || d < 1) throw std::invalid_argument("dimensions must be positive");

  TwoLayerParams params;
  params.p = p;
  params.d = d;
  params.m = m;
  params.b = b;
  params.activation = act;
  params.seed = seed;
  params.generator = kGeneratorId;

  Rng rng(seed);
  const int half = m / 2;
  params.theta.slices.resize(d);
  params.signs.resize(d, half);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd slice(m, p);
    for (int r = 0; r < half; ++r) {
      const Eigen::VectorXd row = rng.normal_vector(p);
      slice.row(r) = row.transpose();
      slice.row(r + half) = row.transpose();  // mirrored rows
    }
    params.theta.slices[i] = std::move(slice);
    for (int r = 0; r < half; ++r) params.signs(i, r) = rng.sign();
  }
  params.theta1 = params.theta;
  return params;
}

Eigen::VectorXd forward_two_layer(const TwoLayerParams& params, const Eigen::VectorXd& x,
                                  NormCheck check) {
  check_input(params, x, check);
  const int half = params.m / 2;
  Eigen::VectorXd out(params.d);
  for (int i = 0; i < params.d; ++i) {
    const Eigen::VectorXd z = params.theta.slices[i] * x;
    double acc = 0.0;
    for (int r = 0; r < half; ++r)
      acc += params.signs(i, r) *
             (params.activation(z(r)) - params.activation(z(r + half)));
    out(i) = acc / params.b;
  }
  return out;
}

Tensor grad_two_layer(const TwoLayerParams& params, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& upstream, NormCheck check) {
  check_input(params, x, check);
  if (upstream.size() != params.d)
    throw std::invalid_argument("upstream dimension mismatch");
  const int half = params.m / 2;
  Tensor grad = Tensor::zeros_like(params.theta);
  for (int i = 0; i < params.d; ++i) {
    if (upstream(i) == 0.0) continue;
    const Eigen::VectorXd z = params.theta.slices[i] * x;
    Eigen::VectorXd coeff(params.m);
    for (int r = 0; r < half; ++r) {
      coeff(r) = params.signs(i, r) * params.activation.deriv(z(r));
      coeff(r + half) = -params.signs(i, r) * params.activation.deriv(z(r + half));
    }
    grad.slices[i] = (upstream(i) / params.b) * coeff * x.transpose();
  }
  return grad;
}

Eigen::VectorXd full_signs(const TwoLayerParams& params, int i) {
  const int half = params.m / 2;
  Eigen::VectorXd a(params.m);
  for (int r = 0; r < half; ++r) {
    a(r) = params.signs(i, r);
    a(r + half) = -params.signs(i, r);
  }
  return a;
}

}  // namespace netoco::neural
