#pragma once

#include <filesystem>

#include "netoco/container.hpp"
#include "netoco/deep_net.hpp"
#include "netoco/two_layer.hpp"

namespace netoco::neural {

// Containers with kinds "two_layer" and "deep"; tensor order is the
// trainable stack, then the frozen blocks, then the init snapshot.
void save_params(const std::filesystem::path& path, const TwoLayerParams& params);
void save_params(const std::filesystem::path& path, const DeepParams& params);

TwoLayerParams load_two_layer(const std::filesystem::path& path);
DeepParams load_deep(const std::filesystem::path& path);

}  // namespace netoco::neural
