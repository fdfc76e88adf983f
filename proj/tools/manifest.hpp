#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hmlc::cli {

/// Reproducibility record written next to every artifact: the subcommand, the
/// seed, the fully resolved configuration, FNV-1a digests of every input
/// file, and the names of the outputs produced. No timestamps, so identical
/// runs write identical manifests.
struct RunManifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json stats = nlohmann::json::object();
    std::vector<std::filesystem::path> inputs;    // digested at write time
    std::vector<std::filesystem::path> outputs;   // recorded by filename

    void add_input(const std::filesystem::path& p) { inputs.push_back(p); }
    void add_output(const std::filesystem::path& p) { outputs.push_back(p); }
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

} // namespace hmlc::cli
