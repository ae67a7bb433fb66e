#include "netoco/container.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace netoco {

namespace {

constexpr char kMagic[8] = {'N', 'E', 'T', 'O', 'C', 'O', '1', '\n'};

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint64_t get_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
  return v;
}

}  // namespace

const Eigen::MatrixXd& Container::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw std::out_of_range("container has no tensor named " + name);
}

bool Container::has_tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return true;
  return false;
}

void save_container(const std::filesystem::path& path, const Container& c) {
  nlohmann::json header;
  header["format"] = "netoco-container";
  header["version"] = 1;
  header["kind"] = c.kind;
  header["meta"] = c.meta;
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& [name, t] : c.tensors)
    shapes.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
  header["tensors"] = shapes;
  const std::string header_str = header.dump();

  std::string blob;
  blob.append(kMagic, sizeof(kMagic));
  const std::uint32_t hlen = static_cast<std::uint32_t>(header_str.size());
  for (int k = 0; k < 4; ++k) blob.push_back(static_cast<char>((hlen >> (8 * k)) & 0xff));
  blob += header_str;
  for (const auto& [name, t] : c.tensors) {
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index col = 0; col < t.cols(); ++col) {
        std::uint64_t bits = 0;
        const double v = t(r, col);
        std::memcpy(&bits, &v, sizeof(bits));
        put_u64_le(blob, bits);
      }
    }
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Container load_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob.size() < 12 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a netoco container: " + path.string());
  std::uint32_t hlen = 0;
  for (int k = 0; k < 4; ++k)
    hlen |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[8 + k])) << (8 * k);
  if (blob.size() < 12 + static_cast<std::size_t>(hlen))
    throw std::runtime_error("truncated container header: " + path.string());
  const nlohmann::json header = nlohmann::json::parse(blob.substr(12, hlen));

  Container c;
  c.kind = header.at("kind").get<std::string>();
  c.meta = header.at("meta");
  std::size_t offset = 12 + hlen;
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    const std::size_t need = static_cast<std::size_t>(rows) * cols * 8;
    if (blob.size() < offset + need)
      throw std::runtime_error("truncated tensor payload: " + name);
    Eigen::MatrixXd t(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index col = 0; col < cols; ++col) {
        const std::uint64_t bits = get_u64_le(blob.data() + offset);
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof(v));
        t(r, col) = v;
        offset += 8;
      }
    }
    c.tensors.emplace_back(name, std::move(t));
  }
  return c;
}

}  // namespace netoco
