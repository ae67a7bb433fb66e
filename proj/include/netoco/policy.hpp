#pragma once

#include <memory>
#include <string>

#include "netoco/deep_net.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::control {

// Uniform view over the two policy architectures. Evaluation is pure;
// set_params installs a new trainable tensor (frozen blocks untouched).
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string architecture() const = 0;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Eigen::VectorXd forward(const Eigen::VectorXd& z_bar) const = 0;
  virtual Tensor gradient(const Eigen::VectorXd& z_bar,
                          const Eigen::VectorXd& upstream) const = 0;
  virtual const Tensor& params() const = 0;
  virtual const Tensor& init_params() const = 0;
  virtual void set_params(Tensor theta) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
};

class TwoLayerPolicy final : public Policy {
 public:
  explicit TwoLayerPolicy(neural::TwoLayerParams params) : net_(std::move(params)) {}
  std::string architecture() const override { return "two_layer"; }
  int input_dim() const override { return net_.p; }
  int output_dim() const override { return net_.d; }
  Eigen::VectorXd forward(const Eigen::VectorXd& z_bar) const override {
    return neural::forward_two_layer(net_, z_bar, neural::NormCheck::strict);
  }
  Tensor gradient(const Eigen::VectorXd& z_bar, const Eigen::VectorXd& upstream) const override {
    return neural::grad_two_layer(net_, z_bar, upstream, neural::NormCheck::strict);
  }
  const Tensor& params() const override { return net_.theta; }
  const Tensor& init_params() const override { return net_.theta1; }
  void set_params(Tensor theta) override { net_.theta = std::move(theta); }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<TwoLayerPolicy>(net_);
  }
  const neural::TwoLayerParams& net() const { return net_; }

 private:
  neural::TwoLayerParams net_;
};

class DeepPolicy final : public Policy {
 public:
  explicit DeepPolicy(neural::DeepParams params) : net_(std::move(params)) {}
  std::string architecture() const override { return "deep"; }
  int input_dim() const override { return net_.p; }
  int output_dim() const override { return net_.d; }
  Eigen::VectorXd forward(const Eigen::VectorXd& z_bar) const override {
    return neural::forward_deep(net_, z_bar, neural::NormCheck::strict);
  }
  Tensor gradient(const Eigen::VectorXd& z_bar, const Eigen::VectorXd& upstream) const override {
    return neural::grad_deep(net_, z_bar, upstream, neural::NormCheck::strict);
  }
  const Tensor& params() const override { return net_.theta; }
  const Tensor& init_params() const override { return net_.theta1; }
  void set_params(Tensor theta) override { net_.theta = std::move(theta); }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<DeepPolicy>(net_);
  }
  const neural::DeepParams& net() const { return net_; }

 private:
  neural::DeepParams net_;
};

}  // namespace netoco::control
