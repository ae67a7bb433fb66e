#pragma once

#include "netoco/deep_net.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::neural {

// Architecture-derived optimization constants. For the two-layer network
// every constant is explicit; for the deep ReLU network the gradient bound
// and near-convexity margin carry hidden constants and are reported with a
// configurable kappa in front (monitoring values, not hard truths).
struct TheoryConstants {
  double gradient_bound = 0.0;   // G
  double nc_margin = 0.0;        // near-convexity epsilon over the R-ball
  double eta0 = 0.0;             // step schedule is eta0 * t^{-1/2}
  double recommended_radius = 0.0;
  bool exact = true;             // false when kappa-scaled
};

// Two-layer: G = C L sqrt(m) / b, eps = 2 C L R^2 / b, eta0 = 2 R b /
// (C L sqrt(m)). The recommended radius is D sqrt(d) when an RF-norm bound D
// is supplied (0 otherwise).
TheoryConstants theory_constants_two_layer(const TwoLayerParams& params, double loss_lipschitz,
                                           double radius, double rf_norm_bound = 0.0);

// Deep: eta0 = 2 R / (L H sqrt(m)); G and the margin are reported as
// kappa * L H sqrt(m) and kappa_nc * R^{4/3} H^{5/2} sqrt(m log m) L sqrt(d).
TheoryConstants theory_constants_deep(const DeepParams& params, double loss_lipschitz,
                                      double radius, double kappa = 1.0,
                                      double kappa_nc = 1.0);

}  // namespace netoco::neural
