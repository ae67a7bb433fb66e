#include "netoco/activation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace netoco::neural {

namespace {
std::map<std::string, Activation>& registry() {
  static std::map<std::string, Activation> reg;
  return reg;
}
}  // namespace

Activation Activation::tanh_act() {
  Activation a;
  a.name = "tanh";
  // |tanh'| <= 1 and |tanh''| = |2 tanh' tanh| <= 4/(3*sqrt(3)) < 1.
  a.C = 1.0;
  a.smooth = true;
  a.f = [](double z) { return std::tanh(z); };
  a.df = [](double z) {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  };
  return a;
}

Activation Activation::relu_act() {
  Activation a;
  a.name = "relu";
  a.C = 1.0;
  a.smooth = false;
  a.f = [](double z) { return z > 0.0 ? z : 0.0; };
  a.df = [](double z) { return z > 0.0 ? 1.0 : 0.0; };
  return a;
}

Activation Activation::by_name(const std::string& name) {
  if (name == "tanh") return tanh_act();
  if (name == "relu") return relu_act();
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown activation: " + name);
  return it->second;
}

void Activation::register_activation(const std::string& name, double C, bool smooth,
                                     std::function<double(double)> f,
                                     std::function<double(double)> df) {
  Activation a;
  a.name = name;
  a.C = C;
  a.smooth = smooth;
  a.f = std::move(f);
  a.df = std::move(df);
  registry()[name] = std::move(a);
}

SmoothnessCheck check_smoothness(const Activation& act, int grid_points) {
  SmoothnessCheck out;
  const double lo = -10.0, hi = 10.0;
  const double step = (hi - lo) / (grid_points - 1);
  double prev_z = lo, prev_d = act.deriv(lo);
  out.max_abs_deriv = std::abs(prev_d);
  for (int i = 1; i < grid_points; ++i) {
    const double z = lo + i * step;
    const double d = act.deriv(z);
    out.max_abs_deriv = std::max(out.max_abs_deriv, std::abs(d));
    out.max_lipschitz_ratio =
        std::max(out.max_lipschitz_ratio, std::abs(d - prev_d) / (z - prev_z));
    prev_z = z;
    prev_d = d;
  }
  out.pass = out.max_abs_deriv <= act.C + 1e-12 &&
             out.max_lipschitz_ratio <= act.C + 1e-12;
  return out;
}

}  // namespace netoco::neural
