#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "cli_common.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/eval.hpp"
#include "hmlc/rng.hpp"

namespace fs = std::filesystem;

namespace hmlc::cli {

namespace {

struct AblateOptions {
    std::string out;
    std::string matrix = "default";
    std::vector<std::string> subset;
    std::uint64_t seed = 0;
    HierarchyOpt hierarchy;
    SynthOpt synth;
    TrainOpt train;
};

void run_ablate(const AblateOptions& opt) {
    if (opt.matrix != "default")
        throw ValidationError("unknown ablation matrix: " + opt.matrix);

    RunManifest manifest;
    manifest.subcommand = "ablate";
    manifest.seed = opt.seed;

    const LabelHierarchy h = opt.hierarchy.resolve(manifest);
    manifest.config["matrix"] = opt.matrix;
    manifest.config.update(opt.synth.config_json());
    manifest.config.update(opt.train.config_json());

    const std::vector<std::string> subset =
        opt.subset.empty() ? competition_labels() : trimmed(opt.subset);
    manifest.config["subset"] = subset;

    const auto [train_ds, gt] = generate_synthetic(h, opt.synth.config(opt.seed));
    const Dataset val = sample_dataset(gt, opt.synth.eval_n, 0.0, 0.5,
                                       derive_seed(opt.seed, "val"), nullptr, "v");

    const AblationResult result =
        run_ablation(train_ds, val, h, default_ablation_matrix(), opt.train.config(opt.seed),
                     opt.train.arch(), subset);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);
    const std::string text = format_ablation_text(result);
    {
        std::ofstream f(dir / "ablation.txt", std::ios::binary);
        if (!f) throw ValidationError("cannot write " + (dir / "ablation.txt").string());
        f << text;
    }
    {
        std::ofstream f(dir / "ablation.csv", std::ios::binary);
        if (!f) throw ValidationError("cannot write " + (dir / "ablation.csv").string());
        f << format_ablation_csv(result);
    }
    manifest.add_output(dir / "ablation.txt");
    manifest.add_output(dir / "ablation.csv");
    manifest.stats["rows"] = result.entries.size();
    write_manifest(dir / "manifest.json", manifest);
    std::fputs(text.c_str(), stdout);
}

} // namespace

void register_ablate(CLI::App& app) {
    auto opt = std::make_shared<AblateOptions>();
    CLI::App* sub = app.add_subcommand(
        "ablate", "train and score every policy/schedule combination on synthetic data");
    sub->add_option("--out", opt->out, "output directory")->required();
    sub->add_option("--matrix", opt->matrix, "row set to run (only 'default')")
        ->capture_default_str();
    sub->add_option("--subset", opt->subset, "labels averaged into each row's mean AUC")
        ->delimiter(',');
    sub->add_option("--seed", opt->seed, "master seed")->capture_default_str();
    opt->hierarchy.attach(*sub);
    opt->synth.n = 2000;
    opt->synth.eval_n = 1000;
    opt->synth.rho = 0.3;
    opt->synth.beta = 0.2;
    opt->synth.attach(*sub);
    opt->train.lr0 = 0.02;
    opt->train.lr_decay = 0.7;
    opt->train.epochs_p1 = 6;
    opt->train.epochs_p2 = 4;
    opt->train.attach(*sub);
    sub->callback([opt] { run_ablate(*opt); });
}

} // namespace hmlc::cli
