#include "manifest.hpp"

#include <fstream>

#include "hmlc/errors.hpp"
#include "hmlc/hash.hpp"

namespace hmlc::cli {

namespace {
constexpr const char* kToolkitVersion = "0.1.0";
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    nlohmann::json doc;
    doc["version"] = kToolkitVersion;
    doc["subcommand"] = m.subcommand;
    doc["seed"] = m.seed;
    doc["config"] = m.config;
    doc["stats"] = m.stats;

    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& p : m.inputs) inputs[p.generic_string()] = hex64(file_digest(p));
    doc["inputs"] = inputs;

    // Filenames only, so runs into different directories stay byte-identical.
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& p : m.outputs) outputs.push_back(p.filename().generic_string());
    doc["outputs"] = outputs;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write manifest: " + path.string());
    out << doc.dump(2) << "\n";
}

} // namespace hmlc::cli
