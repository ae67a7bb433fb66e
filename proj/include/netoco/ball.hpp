#pragma once

#include "netoco/rng.hpp"
#include "netoco/tensor.hpp"

namespace netoco {

enum class BallMode { joint, per_slice };

// Frobenius-norm ball(s) around an initialization snapshot. In joint mode a
// single ball of radius R constrains the whole tensor; in per_slice mode each
// slice is constrained independently by a ball of radius R.
class BallSet {
 public:
  BallSet(Tensor center, double radius, BallMode mode);

  const Tensor& center() const { return center_; }
  double radius() const { return radius_; }
  BallMode mode() const { return mode_; }

  bool contains(const Tensor& theta, double tol = 1e-12) const;

  // Euclidean (Frobenius) projection. Points on or inside the boundary are
  // returned unchanged; outside points are radially rescaled toward center.
  Tensor project(const Tensor& theta) const;

  // Exact uniform sample from the ball: Gaussian direction scaled to radius
  // u^{1/n} * R with u uniform, n the parameter count. Degenerate toward the
  // boundary for huge n; see sample_sphere for the alternative.
  Tensor sample_uniform(Rng& rng) const;
  // Uniform sample from the sphere of radius r around the center (r <= R).
  Tensor sample_sphere(Rng& rng, double r) const;

 private:
  Tensor center_;
  double radius_;
  BallMode mode_;
};

}  // namespace netoco
