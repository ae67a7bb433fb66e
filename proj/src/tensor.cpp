#include "netoco/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace netoco {

Tensor Tensor::scalar(double v) {
  Tensor t;
  t.slices.emplace_back(Eigen::MatrixXd::Constant(1, 1, v));
  return t;
}

Tensor Tensor::zeros_like(const Tensor& other) {
  Tensor t;
  t.slices.reserve(other.slices.size());
  for (const auto& s : other.slices)
    t.slices.emplace_back(Eigen::MatrixXd::Zero(s.rows(), s.cols()));
  return t;
}

Eigen::Index Tensor::size() const {
  Eigen::Index n = 0;
  for (const auto& s : slices) n += s.size();
  return n;
}

bool Tensor::same_shape(const Tensor& other) const {
  if (slices.size() != other.slices.size()) return false;
  for (std::size_t i = 0; i < slices.size(); ++i)
    if (slices[i].rows() != other.slices[i].rows() ||
        slices[i].cols() != other.slices[i].cols())
      return false;
  return true;
}

bool Tensor::all_finite() const {
  for (const auto& s : slices)
    if (!s.allFinite()) return false;
  return true;
}

double Tensor::squared_norm() const {
  double acc = 0.0;
  for (const auto& s : slices) acc += s.squaredNorm();
  return acc;
}

double Tensor::frobenius_norm() const { return std::sqrt(squared_norm()); }

double Tensor::dot(const Tensor& other) const {
  if (!same_shape(other)) throw std::invalid_argument("tensor shape mismatch in dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < slices.size(); ++i)
    acc += slices[i].cwiseProduct(other.slices[i]).sum();
  return acc;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) throw std::invalid_argument("tensor shape mismatch in +=");
  for (std::size_t i = 0; i < slices.size(); ++i) slices[i] += other.slices[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (!same_shape(other)) throw std::invalid_argument("tensor shape mismatch in -=");
  for (std::size_t i = 0; i < slices.size(); ++i) slices[i] -= other.slices[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& sl : slices) sl *= s;
  return *this;
}

Tensor Tensor::operator+(const Tensor& other) const {
  Tensor t = *this;
  t += other;
  return t;
}

Tensor Tensor::operator-(const Tensor& other) const {
  Tensor t = *this;
  t -= other;
  return t;
}

Tensor Tensor::operator*(double s) const {
  Tensor t = *this;
  t *= s;
  return t;
}

bool Tensor::operator==(const Tensor& other) const {
  if (!same_shape(other)) return false;
  for (std::size_t i = 0; i < slices.size(); ++i)
    if ((slices[i].array() != other.slices[i].array()).any()) return false;
  return true;
}

}  // namespace netoco
