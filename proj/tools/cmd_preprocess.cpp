#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>
#include <vector>

#include "cli_common.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/preprocess.hpp"

namespace fs = std::filesystem;

namespace hmlc::cli {

namespace {

struct PreprocessOptions {
    std::string in;
    std::string out;
    std::string template_file;
    std::size_t resize = 256;
    std::size_t crop = 224;
    double mean = 0.449;
    double std_dev = 0.226;
    double var_threshold = 1e-6;
    std::size_t threads = 1;
};

void run_preprocess(const PreprocessOptions& opt) {
    RunManifest manifest;
    manifest.subcommand = "preprocess";
    manifest.config["resize"] = opt.resize;
    manifest.config["crop"] = opt.crop;
    manifest.config["mean"] = opt.mean;
    manifest.config["std"] = opt.std_dev;
    manifest.config["var_threshold"] = opt.var_threshold;
    manifest.config["template"] = opt.template_file.empty() ? "none" : opt.template_file;

    PreprocessConfig cfg;
    cfg.resize = opt.resize;
    cfg.crop = opt.crop;
    cfg.mean = opt.mean;
    cfg.std_dev = opt.std_dev;
    cfg.var_threshold = opt.var_threshold;
    if (!opt.template_file.empty()) {
        cfg.template_image = read_pgm(opt.template_file);
        manifest.add_input(opt.template_file);
    }

    if (!fs::is_directory(opt.in))
        throw ValidationError("input directory not found: " + opt.in);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opt.in))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ValidationError("no .pgm files in " + opt.in);

    fs::create_directories(opt.out);
    const fs::path dir(opt.out);

    std::vector<MatchResult> matches(files.size());
    std::vector<std::exception_ptr> failures(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
            try {
                const GrayImage img = read_pgm(files[i]);
                const PreprocessResult res = preprocess_image(img, cfg);
                save_tensor(dir / (files[i].stem().string() + ".hmlt"), res.image);
                matches[i] = res.match;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(opt.threads, files.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    std::ofstream csv(dir / "match_manifest.csv", std::ios::binary);
    csv << "file,row,col,ncc\n";
    char line[128];
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (matches[i].valid)
            std::snprintf(line, sizeof line, "%zu,%zu,%.6f", matches[i].row, matches[i].col,
                          matches[i].score);
        else
            std::snprintf(line, sizeof line, "%zu,%zu,undefined", matches[i].row, matches[i].col);
        csv << files[i].filename().string() << "," << line << "\n";
    }
    csv.close();

    for (const auto& f : files) {
        manifest.add_input(f);
        manifest.add_output(dir / (f.stem().string() + ".hmlt"));
    }
    manifest.add_output(dir / "match_manifest.csv");
    manifest.stats["images"] = files.size();
    write_manifest(dir / "manifest.json", manifest);
    std::printf("preprocessed %zu images into %s\n", files.size(), opt.out.c_str());
}

} // namespace

void register_preprocess(CLI::App& app) {
    auto opt = std::make_shared<PreprocessOptions>();
    CLI::App* sub = app.add_subcommand("preprocess", "resize, template-match, crop and normalize PGM images");
    sub->add_option("--in", opt->in, "directory of .pgm inputs")->required();
    sub->add_option("--out", opt->out, "output directory for .hmlt tensors")->required();
    sub->add_option("--template", opt->template_file, "template PGM (omit for center crop)");
    sub->add_option("--resize", opt->resize, "rescale side length")->capture_default_str();
    sub->add_option("--crop", opt->crop, "crop side length")->capture_default_str();
    sub->add_option("--mean", opt->mean, "normalization mean")->capture_default_str();
    sub->add_option("--std", opt->std_dev, "normalization standard deviation")->capture_default_str();
    sub->add_option("--var-threshold", opt->var_threshold, "minimum window variance for matching")
        ->capture_default_str();
    sub->add_option("--threads", opt->threads, "worker threads")->capture_default_str();
    sub->callback([opt] { run_preprocess(*opt); });
}

} // namespace hmlc::cli
