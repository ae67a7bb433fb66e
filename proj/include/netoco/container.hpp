#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace netoco {

// Self-describing binary container: 8-byte magic, uint32 LE header length,
// UTF-8 JSON header, then the declared tensors as flat little-endian float64
// in row-major order. load(save(x)) reproduces x bitwise. The exact layout
// is documented in docs/FORMATS.md.
struct Container {
  std::string kind;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;

  const Eigen::MatrixXd& tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;
};

// Writes atomically (temp file in the target directory, then rename).
void save_container(const std::filesystem::path& path, const Container& c);
Container load_container(const std::filesystem::path& path);

}  // namespace netoco
