#include <cstdio>
#include <filesystem>
#include <memory>

#include "cli_common.hpp"
#include "hmlc/infer.hpp"
#include "hmlc/rng.hpp"

namespace fs = std::filesystem;

namespace hmlc::cli {

namespace {

struct GenOptions {
    std::string out;
    std::uint64_t seed = 0;
    HierarchyOpt hierarchy;
    SynthOpt synth;
};

void run_gen(const GenOptions& opt) {
    RunManifest manifest;
    manifest.subcommand = "gen";
    manifest.seed = opt.seed;

    const LabelHierarchy h = opt.hierarchy.resolve(manifest);
    manifest.config.update(opt.synth.config_json());

    const auto [train, gt] = generate_synthetic(h, opt.synth.config(opt.seed));

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);
    save_csv(dir / "train.csv", train);
    save_features_csv(dir / "train_features.csv", train);
    manifest.add_output(dir / "train.csv");
    manifest.add_output(dir / "train_features.csv");
    manifest.stats["train_rows"] = train.size();

    if (opt.synth.eval_n > 0) {
        const Dataset valid = sample_dataset(gt, opt.synth.eval_n, 0.0, 0.5,
                                             derive_seed(opt.seed, "val"), nullptr, "v");
        save_csv(dir / "valid.csv", valid);
        save_features_csv(dir / "valid_features.csv", valid);

        std::vector<std::string> ids;
        std::vector<std::vector<double>> oracle;
        for (const auto& s : valid.samples) {
            ids.push_back(s.id);
            oracle.push_back(oracle_scores(gt, s));
        }
        write_predictions_csv(dir / "oracle.csv", ids, oracle, h.labels());

        manifest.add_output(dir / "valid.csv");
        manifest.add_output(dir / "valid_features.csv");
        manifest.add_output(dir / "oracle.csv");
        manifest.stats["eval_rows"] = valid.size();
    }

    write_manifest(dir / "manifest.json", manifest);
    std::printf("wrote %zu training rows to %s\n", train.size(), opt.out.c_str());
}

} // namespace

void register_gen(CLI::App& app) {
    auto opt = std::make_shared<GenOptions>();
    CLI::App* sub = app.add_subcommand("gen", "sample a synthetic labeled dataset");
    sub->add_option("--out", opt->out, "output directory")->required();
    sub->add_option("--seed", opt->seed, "master seed")->capture_default_str();
    opt->hierarchy.attach(*sub);
    opt->synth.attach(*sub);
    sub->callback([opt] { run_gen(*opt); });
}

} // namespace hmlc::cli
