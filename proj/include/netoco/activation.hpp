#pragma once

#include <functional>
#include <string>

namespace netoco::neural {

// Activation with its derivative and the constant C bounding |sigma'| and
// the Lipschitz modulus of sigma'. relu is not smooth; it carries C = 1 for
// the derivative bound only and is flagged accordingly.
struct Activation {
  std::string name;
  double C = 1.0;
  bool smooth = true;
  std::function<double(double)> f;
  std::function<double(double)> df;

  double operator()(double z) const { return f(z); }
  double deriv(double z) const { return df(z); }

  static Activation tanh_act();
  static Activation relu_act();  // subgradient convention: relu'(0) = 0
  static Activation by_name(const std::string& name);

  // Registers a user activation; by_name resolves it afterwards.
  static void register_activation(const std::string& name, double C, bool smooth,
                                  std::function<double(double)> f,
                                  std::function<double(double)> df);
};

struct SmoothnessCheck {
  double max_abs_deriv = 0.0;       // max |sigma'(z)| on the grid
  double max_lipschitz_ratio = 0.0; // max |sigma'(z)-sigma'(z')| / |z-z'|
  bool pass = false;
};

// Dense grid check of the derivative bound and derivative Lipschitz constant
// over [-10, 10] against the declared C.
SmoothnessCheck check_smoothness(const Activation& act, int grid_points = 4001);

}  // namespace netoco::neural
