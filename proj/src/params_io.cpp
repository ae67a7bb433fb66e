#include "netoco/params_io.hpp"

#include <stdexcept>

namespace netoco::neural {

void save_params(const std::filesystem::path& path, const TwoLayerParams& params) {
  Container c;
  c.kind = "two_layer";
  c.meta = {{"p", params.p},
            {"d", params.d},
            {"m", params.m},
            {"H", 0},
            {"b", params.b},
            {"activation", params.activation.name},
            {"seed", params.seed},
            {"generator", params.generator}};
  for (int i = 0; i < params.d; ++i)
    c.tensors.emplace_back("theta/" + std::to_string(i), params.theta.slices[i]);
  c.tensors.emplace_back("a", params.signs);
  for (int i = 0; i < params.d; ++i)
    c.tensors.emplace_back("theta1/" + std::to_string(i), params.theta1.slices[i]);
  save_container(path, c);
}

void save_params(const std::filesystem::path& path, const DeepParams& params) {
  Container c;
  c.kind = "deep";
  c.meta = {{"p", params.p},
            {"d", params.d},
            {"m", params.m},
            {"H", params.H},
            {"b", 1.0},
            {"activation", "relu"},
            {"seed", params.seed},
            {"generator", params.generator}};
  for (int i = 0; i < params.d; ++i)
    c.tensors.emplace_back("theta/" + std::to_string(i), params.theta.slices[i]);
  c.tensors.emplace_back("A", params.A);
  c.tensors.emplace_back("a", params.a);
  for (int i = 0; i < params.d; ++i)
    c.tensors.emplace_back("theta1/" + std::to_string(i), params.theta1.slices[i]);
  save_container(path, c);
}

TwoLayerParams load_two_layer(const std::filesystem::path& path) {
  const Container c = load_container(path);
  if (c.kind != "two_layer")
    throw std::runtime_error("expected a two_layer container, got " + c.kind);
  TwoLayerParams params;
  params.p = c.meta.at("p").get<int>();
  params.d = c.meta.at("d").get<int>();
  params.m = c.meta.at("m").get<int>();
  params.b = c.meta.at("b").get<double>();
  params.activation = Activation::by_name(c.meta.at("activation").get<std::string>());
  params.seed = c.meta.at("seed").get<std::uint64_t>();
  params.generator = c.meta.at("generator").get<std::string>();
  params.signs = c.tensor("a");
  params.theta.slices.resize(params.d);
  params.theta1.slices.resize(params.d);
  for (int i = 0; i < params.d; ++i) {
    params.theta.slices[i] = c.tensor("theta/" + std::to_string(i));
    params.theta1.slices[i] = c.tensor("theta1/" + std::to_string(i));
  }
  return params;
}

DeepParams load_deep(const std::filesystem::path& path) {
  const Container c = load_container(path);
  if (c.kind != "deep")
    throw std::runtime_error("expected a deep container, got " + c.kind);
  DeepParams params;
  params.p = c.meta.at("p").get<int>();
  params.d = c.meta.at("d").get<int>();
  params.m = c.meta.at("m").get<int>();
  params.H = c.meta.at("H").get<int>();
  params.seed = c.meta.at("seed").get<std::uint64_t>();
  params.generator = c.meta.at("generator").get<std::string>();
  params.A = c.tensor("A");
  params.a = c.tensor("a");
  params.theta.slices.resize(params.d);
  params.theta1.slices.resize(params.d);
  for (int i = 0; i < params.d; ++i) {
    params.theta.slices[i] = c.tensor("theta/" + std::to_string(i));
    params.theta1.slices[i] = c.tensor("theta1/" + std::to_string(i));
  }
  return params;
}

}  // namespace netoco::neural
