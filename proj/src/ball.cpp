#include "netoco/ball.hpp"

#include <cmath>
#include <stdexcept>

namespace netoco {

BallSet::BallSet(Tensor center, double radius, BallMode mode)
    : center_(std::move(center)), radius_(radius), mode_(mode) {
  if (radius_ < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
}

bool BallSet::contains(const Tensor& theta, double tol) const {
  if (!theta.same_shape(center_)) return false;
  if (mode_ == BallMode::joint) {
    return (theta - center_).frobenius_norm() <= radius_ + tol;
  }
  for (std::size_t i = 0; i < theta.slices.size(); ++i) {
    if ((theta.slices[i] - center_.slices[i]).norm() > radius_ + tol) return false;
  }
  return true;
}

Tensor BallSet::project(const Tensor& theta) const {
  if (!theta.same_shape(center_))
    throw std::invalid_argument("projection shape mismatch");
  Tensor out = theta;
  if (mode_ == BallMode::joint) {
    const double dist = (theta - center_).frobenius_norm();
    if (dist <= radius_) return out;  // boundary points pass through unchanged
    const double scale = radius_ / dist;
    for (std::size_t i = 0; i < out.slices.size(); ++i)
      out.slices[i] = center_.slices[i] + scale * (theta.slices[i] - center_.slices[i]);
    return out;
  }
  for (std::size_t i = 0; i < out.slices.size(); ++i) {
    const double dist = (theta.slices[i] - center_.slices[i]).norm();
    if (dist <= radius_) continue;
    out.slices[i] = center_.slices[i] +
                    (radius_ / dist) * (theta.slices[i] - center_.slices[i]);
  }
  return out;
}

namespace {

Tensor gaussian_like(const Tensor& shape, Rng& rng) {
  Tensor g;
  g.slices.reserve(shape.slices.size());
  for (const auto& s : shape.slices) g.slices.push_back(rng.normal_matrix(s.rows(), s.cols()));
  return g;
}

}  // namespace

Tensor BallSet::sample_uniform(Rng& rng) const {
  Tensor g = gaussian_like(center_, rng);
  if (mode_ == BallMode::joint) {
    const double n = static_cast<double>(center_.size());
    const double target = std::pow(rng.uniform(), 1.0 / n) * radius_;
    const double nrm = g.frobenius_norm();
    const double scale = (nrm > 0.0) ? target / nrm : 0.0;
    return center_ + g * scale;
  }
  Tensor out = center_;
  for (std::size_t i = 0; i < out.slices.size(); ++i) {
    const double n = static_cast<double>(center_.slices[i].size());
    const double target = std::pow(rng.uniform(), 1.0 / n) * radius_;
    const double nrm = g.slices[i].norm();
    if (nrm > 0.0) out.slices[i] += (target / nrm) * g.slices[i];
  }
  return out;
}

Tensor BallSet::sample_sphere(Rng& rng, double r) const {
  if (r < 0.0 || r > radius_ + 1e-12)
    throw std::invalid_argument("sphere radius outside the ball");
  Tensor g = gaussian_like(center_, rng);
  if (mode_ == BallMode::joint) {
    const double nrm = g.frobenius_norm();
    const double scale = (nrm > 0.0) ? r / nrm : 0.0;
    return center_ + g * scale;
  }
  Tensor out = center_;
  for (std::size_t i = 0; i < out.slices.size(); ++i) {
    const double nrm = g.slices[i].norm();
    if (nrm > 0.0) out.slices[i] += (r / nrm) * g.slices[i];
  }
  return out;
}

}  // namespace netoco
