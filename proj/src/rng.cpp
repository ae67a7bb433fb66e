#include "netoco/rng.hpp"

#include <cmath>

namespace netoco {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view component) {
  // FNV-1a over the component name, mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : component) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return splitmix64(h ^ splitmix64(master));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double Rng::sign() { return (engine_() & 1ull) ? 1.0 : -1.0; }

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Eigen::MatrixXd Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order so the stream is layout independent.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal();
  return m;
}

Eigen::VectorXd Rng::unit_vector(Eigen::Index n) {
  Eigen::VectorXd v = normal_vector(n);
  double nrm = v.norm();
  while (nrm == 0.0) {
    v = normal_vector(n);
    nrm = v.norm();
  }
  return v / nrm;
}

}  // namespace netoco
