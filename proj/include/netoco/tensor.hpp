#pragma once

#include <vector>

#include <Eigen/Core>

namespace netoco {

// Parameter container used by the optimization engine. A Tensor is an ordered
// list of dense slices; each slice is one output coordinate's trainable block
// (m x p for the two-layer net, (H*m) x m for the deep net). Plain scalar
// decision variables use a single 1x1 slice.
struct Tensor {
  std::vector<Eigen::MatrixXd> slices;

  Tensor() = default;
  explicit Tensor(std::vector<Eigen::MatrixXd> s) : slices(std::move(s)) {}
  static Tensor scalar(double v);
  static Tensor zeros_like(const Tensor& other);

  Eigen::Index slice_count() const { return static_cast<Eigen::Index>(slices.size()); }
  Eigen::Index size() const;
  bool same_shape(const Tensor& other) const;
  bool all_finite() const;

  double squared_norm() const;
  double frobenius_norm() const;
  double dot(const Tensor& other) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);
  Tensor operator+(const Tensor& other) const;
  Tensor operator-(const Tensor& other) const;
  Tensor operator*(double s) const;

  bool operator==(const Tensor& other) const;
};

}  // namespace netoco
