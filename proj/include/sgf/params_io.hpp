#pragma once

#include <filesystem>

#include "sgf/network.hpp"

namespace sgf::net {

// Single-file container: magic, JSON manifest (variant, scale, tensor
// names/shapes/offsets), then the raw IEEE-754 binary64 little-endian blob
// in manifest order. Round-trips are bitwise lossless.
void save_params(const std::filesystem::path& path, const NetworkSpec& spec,
                 const ParamStore& params);

struct LoadedParams {
  NetworkSpec spec;
  ParamStore params;
};
LoadedParams load_params(const std::filesystem::path& path);

}  // namespace sgf::net
