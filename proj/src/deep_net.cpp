#include "netoco/deep_net.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "netoco/rng.hpp"

namespace netoco::neural {

namespace {

void check_input(const DeepParams& params, const Eigen::VectorXd& x, NormCheck check) {
  if (x.size() != params.p) throw std::invalid_argument("input dimension mismatch");
  if (check == NormCheck::strict) {
    const double nrm = x.norm();
    if (nrm != 0.0 && std::abs(nrm - 1.0) > 1e-9)
      throw std::invalid_argument("input is not unit norm (strict mode)");
  }
}

}  // namespace

DeepParams init_deep(int p, int d, int m, int H, std::uint64_t seed) {
  if (p < 1 || d < 1 || m < 1 || H < 1)
    throw std::invalid_argument("deep network dimensions must be positive");
  DeepParams params;
  params.p = p;
  params.d = d;
  params.m = m;
  params.H = H;
  params.seed = seed;
  params.generator = kGeneratorId;

  Rng rng(seed);
  const double layer_sd = std::sqrt(2.0 / m);
  params.A = layer_sd * rng.normal_matrix(m, p);
  params.theta.slices.resize(d);
  params.a.resize(d, m);
  for (int i = 0; i < d; ++i) {
    params.theta.slices[i] = layer_sd * rng.normal_matrix(H * m, m);
    params.a.row(i) = rng.normal_vector(m).transpose();
  }
  params.theta1 = params.theta;
  return params;
}

Eigen::VectorXd forward_deep(const DeepParams& params, const Eigen::VectorXd& x,
                             NormCheck check) {
  check_input(params, x, check);
  const Eigen::VectorXd x0 = params.A * x;
  Eigen::VectorXd out(params.d);
  for (int i = 0; i < params.d; ++i) {
    Eigen::VectorXd h = x0;
    for (int layer = 0; layer < params.H; ++layer)
      h = (params.layer(i, layer) * h).cwiseMax(0.0);
    out(i) = params.a.row(i).dot(h);
  }
  return out;
}

Tensor grad_deep(const DeepParams& params, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& upstream, NormCheck check) {
  check_input(params, x, check);
  if (upstream.size() != params.d)
    throw std::invalid_argument("upstream dimension mismatch");
  const Eigen::VectorXd x0 = params.A * x;
  Tensor grad = Tensor::zeros_like(params.theta);
  std::vector<Eigen::VectorXd> acts(params.H + 1);
  for (int i = 0; i < params.d; ++i) {
    if (upstream(i) == 0.0) continue;
    acts[0] = x0;
    for (int layer = 0; layer < params.H; ++layer)
      acts[layer + 1] = (params.layer(i, layer) * acts[layer]).cwiseMax(0.0);
    // Backward pass; the ReLU gate is acts[h+1] > 0 (relu'(0) = 0).
    Eigen::VectorXd g = upstream(i) * params.a.row(i).transpose();
    for (int layer = params.H - 1; layer >= 0; --layer) {
      const Eigen::VectorXd gated =
          (acts[layer + 1].array() > 0.0).select(g, Eigen::VectorXd::Zero(params.m));
      grad.slices[i].block(layer * params.m, 0, params.m, params.m) =
          gated * acts[layer].transpose();
      if (layer > 0) g = params.layer(i, layer).transpose() * gated;
    }
  }
  return grad;
}

std::uint64_t frozen_checksum(const DeepParams& params) {
  // FNV-1a over the IEEE bit patterns of A then a, row-major.
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffull;
      h *= 0x100000001b3ull;
    }
  };
  for (Eigen::Index r = 0; r < params.A.rows(); ++r)
    for (Eigen::Index c = 0; c < params.A.cols(); ++c) mix(params.A(r, c));
  for (Eigen::Index r = 0; r < params.a.rows(); ++r)
    for (Eigen::Index c = 0; c < params.a.cols(); ++c) mix(params.a(r, c));
  return h;
}

double min_abs_preactivation(const DeepParams& params, const Eigen::VectorXd& x) {
  const Eigen::VectorXd x0 = params.A * x;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < params.d; ++i) {
    Eigen::VectorXd h = x0;
    for (int layer = 0; layer < params.H; ++layer) {
      const Eigen::VectorXd pre = params.layer(i, layer) * h;
      min_abs = std::min(min_abs, pre.cwiseAbs().minCoeff());
      h = pre.cwiseMax(0.0);
    }
  }
  return min_abs;
}

}  // namespace netoco::neural
