#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmlc/data.hpp"
#include "hmlc/hierarchy.hpp"
#include "hmlc/model.hpp"
#include "hmlc/policy.hpp"
#include "hmlc/train.hpp"
#include "manifest.hpp"

namespace hmlc::cli {

void register_gen(CLI::App& app);
void register_preprocess(CLI::App& app);
void register_train(CLI::App& app);
void register_predict(CLI::App& app);
void register_ensemble(CLI::App& app);
void register_eval(CLI::App& app);
void register_ablate(CLI::App& app);

/// --hierarchy FILE; the built-in chest X-ray forest when absent.
struct HierarchyOpt {
    std::string file;

    void attach(CLI::App& sub);
    LabelHierarchy resolve(RunManifest& manifest) const;
};

/// --policy/--lsr-low/--lsr-high/--lsr-resample/--missing.
struct PolicyOpt {
    std::string name = "u-zeros";
    double lsr_low = 0.0;
    double lsr_high = 0.0;
    bool resample = false;
    std::string missing = "as-negative";

    void attach(CLI::App& sub);
    LabelPolicy resolve() const;
    nlohmann::json config_json(const LabelPolicy& p) const;

private:
    CLI::Option* low_opt_ = nullptr;
    CLI::Option* high_opt_ = nullptr;
};

/// Optimizer/architecture flags shared by train and ablate. Set the fields
/// before attach() to change a subcommand's defaults.
struct TrainOpt {
    double lr0 = 1e-4;
    double lr_decay = 0.1;
    std::size_t batch = 32;
    std::size_t epochs_p1 = 5;
    std::size_t epochs_p2 = 5;
    std::vector<std::size_t> hidden = {64, 64};

    void attach(CLI::App& sub);
    TrainConfig config(std::uint64_t seed) const;
    ArchConfig arch() const;
    nlohmann::json config_json() const;
};

/// Generator flags shared by gen and ablate.
struct SynthOpt {
    std::size_t n = 1000;
    std::size_t eval_n = 0;
    std::size_t d = 16;
    double rho = 0.0;
    double beta = 0.5;
    double weight_scale = 8.0;
    double parent_mix = 0.5;

    void attach(CLI::App& sub);
    SyntheticConfig config(std::uint64_t seed) const;
    nlohmann::json config_json() const;
};

/// Feature CSV as a standalone dataset: ids from the file, labels all blank.
Dataset features_only_dataset(const std::filesystem::path& file, const LabelHierarchy& h);

/// Loads a checkpoint and rejects it when its hierarchy digest differs from
/// the active forest's.
ModelParams load_checked_model(const std::filesystem::path& file, const LabelHierarchy& h);

std::vector<std::string> trimmed(std::vector<std::string> values);

} // namespace hmlc::cli
