#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>

#include "cli_common.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/infer.hpp"
#include "hmlc/preprocess.hpp"

namespace fs = std::filesystem;

namespace hmlc::cli {

namespace {

struct PredictOptions {
    std::vector<std::string> models;
    std::string features;
    std::string images;
    std::string template_file;
    std::string out;
    std::size_t tta = 0;
    std::size_t resize = 256;
    std::size_t crop = 224;
    double mean = 0.449;
    double std_dev = 0.226;
    std::uint64_t seed = 0;
    HierarchyOpt hierarchy;
};

void run_predict(const char* name, const PredictOptions& opt) {
    RunManifest manifest;
    manifest.subcommand = name;
    manifest.seed = opt.seed;

    const LabelHierarchy h = opt.hierarchy.resolve(manifest);
    if (opt.features.empty() == opt.images.empty())
        throw ValidationError("exactly one of --features and --images is required");
    if (opt.tta > 0 && opt.images.empty())
        throw ValidationError("--tta augments images; it cannot be used with --features");

    std::vector<ModelParams> models;
    for (const auto& file : opt.models) {
        models.push_back(load_checked_model(file, h));
        manifest.add_input(file);
    }
    manifest.config["models"] = opt.models.size();
    manifest.config["tta"] = opt.tta;

    std::optional<TtaConfig> tta;
    if (opt.tta > 0) {
        tta.emplace();
        tta->count = opt.tta;
        tta->seed = opt.seed;
    }

    std::vector<std::string> ids;
    std::vector<std::vector<double>> probs;
    if (!opt.features.empty()) {
        const Dataset ds = features_only_dataset(opt.features, h);
        manifest.add_input(opt.features);
        for (const auto& s : ds.samples) {
            EnsembleInput input;
            input.features = s.features;
            ids.push_back(s.id);
            probs.push_back(ensemble_predict(models, input, h, tta).probs);
        }
    } else {
        PreprocessConfig pre;
        pre.resize = opt.resize;
        pre.crop = opt.crop;
        pre.mean = opt.mean;
        pre.std_dev = opt.std_dev;
        if (!opt.template_file.empty()) {
            pre.template_image = read_pgm(opt.template_file);
            manifest.add_input(opt.template_file);
        }
        manifest.config["template"] = opt.template_file.empty() ? "none" : opt.template_file;

        if (!fs::is_directory(opt.images))
            throw ValidationError("image directory not found: " + opt.images);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(opt.images))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ValidationError("no .pgm files in " + opt.images);

        for (const auto& file : files) {
            const GrayImage img = read_pgm(file);
            EnsembleInput input;
            input.image = &img;
            input.pre = &pre;
            ids.push_back(file.stem().string());
            probs.push_back(ensemble_predict(models, input, h, tta).probs);
            manifest.add_input(file);
        }
    }

    write_predictions_csv(opt.out, ids, probs, h.labels());
    manifest.add_output(opt.out);
    manifest.stats["rows"] = ids.size();
    write_manifest(opt.out + ".manifest.json", manifest);
    std::printf("wrote %zu predictions to %s\n", ids.size(), opt.out.c_str());
}

void attach_shared(CLI::App& sub, std::shared_ptr<PredictOptions> opt) {
    sub.add_option("--features", opt->features, "feature CSV to score");
    sub.add_option("--images", opt->images, "directory of .pgm images to score");
    sub.add_option("--template", opt->template_file, "template PGM for image alignment");
    sub.add_option("--out", opt->out, "predictions CSV path")->required();
    sub.add_option("--tta", opt->tta, "augmented copies per image (0 = off)")
        ->capture_default_str();
    sub.add_option("--resize", opt->resize, "rescale side length")->capture_default_str();
    sub.add_option("--crop", opt->crop, "crop side length")->capture_default_str();
    sub.add_option("--mean", opt->mean, "normalization mean")->capture_default_str();
    sub.add_option("--std", opt->std_dev, "normalization standard deviation")
        ->capture_default_str();
    sub.add_option("--seed", opt->seed, "augmentation seed")->capture_default_str();
    opt->hierarchy.attach(sub);
}

} // namespace

void register_predict(CLI::App& app) {
    auto opt = std::make_shared<PredictOptions>();
    CLI::App* sub = app.add_subcommand("predict", "score samples with one checkpoint");
    opt->models.resize(1);
    sub->add_option("--model", opt->models[0], "checkpoint path")->required();
    attach_shared(*sub, opt);
    sub->callback([opt] { run_predict("predict", *opt); });
}

void register_ensemble(CLI::App& app) {
    auto opt = std::make_shared<PredictOptions>();
    CLI::App* sub = app.add_subcommand("ensemble", "score samples with averaged checkpoints");
    sub->add_option("--models", opt->models, "checkpoint paths")->required()->expected(1, -1);
    attach_shared(*sub, opt);
    sub->callback([opt] { run_predict("ensemble", *opt); });
}

} // namespace hmlc::cli
