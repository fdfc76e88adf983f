#include <cstdio>
#include <memory>

#include "cli_common.hpp"
#include "hmlc/checkpoint.hpp"
#include "hmlc/train.hpp"

namespace hmlc::cli {

namespace {

struct TrainOptions {
    std::string data;
    std::string features;
    std::string out;
    bool conditional = false;
    bool frontal_only = false;
    std::uint64_t seed = 0;
    HierarchyOpt hierarchy;
    PolicyOpt policy;
    TrainOpt train;
};

void run_train(const TrainOptions& opt) {
    RunManifest manifest;
    manifest.subcommand = "train";
    manifest.seed = opt.seed;

    const LabelHierarchy h = opt.hierarchy.resolve(manifest);
    const LabelPolicy policy = opt.policy.resolve();
    manifest.config.update(opt.policy.config_json(policy));
    manifest.config.update(opt.train.config_json());
    manifest.config["conditional"] = opt.conditional;
    manifest.config["frontal_only"] = opt.frontal_only;

    Dataset ds = load_csv(opt.data, h,
                          opt.frontal_only ? ViewFilter::FrontalOnly : ViewFilter::All);
    load_features_csv(opt.features, ds);
    manifest.add_input(opt.data);
    manifest.add_input(opt.features);

    const TrainConfig cfg = opt.train.config(opt.seed);
    const ArchConfig arch = opt.train.arch();
    const TrainResult result = opt.conditional ? train_two_phase(ds, h, policy, cfg, arch)
                                               : train_flat(ds, h, policy, cfg, arch);

    if (opt.conditional)
        std::printf("phase 1 subset: %zu samples, %zu negative-parent rows\n",
                    result.log.phase1_samples, result.log.phase1_negative_parent);
    for (const auto& e : result.log.epochs) {
        if (e.phase > 0)
            std::printf("phase %d epoch %zu  lr %.6g  loss %.6f\n", e.phase, e.epoch, e.lr,
                        e.mean_loss);
        else
            std::printf("epoch %zu  lr %.6g  loss %.6f\n", e.epoch, e.lr, e.mean_loss);
    }

    save_checkpoint(opt.out, result.model);
    manifest.add_output(opt.out);

    manifest.stats["train_rows"] = ds.size();
    if (opt.conditional) {
        manifest.stats["phase1_samples"] = result.log.phase1_samples;
        manifest.stats["phase1_negative_parent"] = result.log.phase1_negative_parent;
    }
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : result.log.epochs) {
        nlohmann::json row;
        row["phase"] = e.phase;
        row["epoch"] = e.epoch;
        row["lr"] = e.lr;
        row["loss"] = e.mean_loss;
        epochs.push_back(row);
    }
    manifest.stats["epochs"] = epochs;
    write_manifest(opt.out + ".manifest.json", manifest);
    std::printf("saved checkpoint to %s\n", opt.out.c_str());
}

} // namespace

void register_train(CLI::App& app) {
    auto opt = std::make_shared<TrainOptions>();
    CLI::App* sub = app.add_subcommand("train", "fit a classifier on a labeled feature dataset");
    sub->add_option("--data", opt->data, "label CSV")->required();
    sub->add_option("--features", opt->features, "feature CSV joined by id")->required();
    sub->add_option("--out", opt->out, "checkpoint path")->required();
    sub->add_flag("--conditional", opt->conditional,
                  "two-phase schedule: conditional subset first, then final-layer tuning");
    sub->add_flag("--frontal-only", opt->frontal_only, "drop lateral-view rows at load");
    sub->add_option("--seed", opt->seed, "master seed")->capture_default_str();
    opt->hierarchy.attach(*sub);
    opt->policy.attach(*sub);
    opt->train.attach(*sub);
    sub->callback([opt] { run_train(*opt); });
}

} // namespace hmlc::cli
