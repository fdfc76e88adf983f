#pragma once

#include <filesystem>

#include "hmlc/model.hpp"

namespace hmlc {

/// Binary container: magic "HMLC", u32 version, u64 header length, a JSON
/// header (layer shapes, hierarchy digest, policy name, seed), u64 value
/// count, then every parameter as little-endian f64 in layer order (weights
/// before biases). Writing the same model twice yields identical bytes.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& m);

ModelParams load_checkpoint(const std::filesystem::path& path);

} // namespace hmlc
