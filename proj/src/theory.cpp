#include "netoco/theory.hpp"

#include <cmath>

namespace netoco::neural {

TheoryConstants theory_constants_two_layer(const TwoLayerParams& params,
                                           double loss_lipschitz, double radius,
                                           double rf_norm_bound) {
  const double C = params.activation.C;
  const double L = loss_lipschitz;
  const double sqrt_m = std::sqrt(static_cast<double>(params.m));
  TheoryConstants out;
  out.gradient_bound = C * L * sqrt_m / params.b;
  out.nc_margin = 2.0 * C * L * radius * radius / params.b;
  out.eta0 = (C * L > 0.0) ? 2.0 * radius * params.b / (C * L * sqrt_m) : 0.0;
  out.recommended_radius = rf_norm_bound * std::sqrt(static_cast<double>(params.d));
  out.exact = true;
  return out;
}

TheoryConstants theory_constants_deep(const DeepParams& params, double loss_lipschitz,
                                      double radius, double kappa, double kappa_nc) {
  const double L = loss_lipschitz;
  const double H = static_cast<double>(params.H);
  const double m = static_cast<double>(params.m);
  TheoryConstants out;
  out.gradient_bound = kappa * L * H * std::sqrt(m);
  out.nc_margin = kappa_nc * std::pow(radius, 4.0 / 3.0) * std::pow(H, 2.5) *
                  std::sqrt(m * std::log(m)) * L * std::sqrt(static_cast<double>(params.d));
  out.eta0 = (L > 0.0) ? 2.0 * radius / (L * H * std::sqrt(m)) : 0.0;
  out.recommended_radius = 0.0;
  out.exact = false;
  return out;
}

}  // namespace netoco::neural
