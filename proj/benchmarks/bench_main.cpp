#include <benchmark/benchmark.h>

#include <vector>

#include "hmlc/data.hpp"
#include "hmlc/eval.hpp"
#include "hmlc/infer.hpp"
#include "hmlc/model.hpp"
#include "hmlc/preprocess.hpp"
#include "hmlc/rng.hpp"

namespace {

using namespace hmlc;

const LabelHierarchy& chex() { return LabelHierarchy::chexpert(); }

ModelParams default_model(std::size_t d) { return init_model(d, chex().size(), ArchConfig{}, 1); }

std::vector<double> random_features(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> f(d);
    for (double& v : f) v = rng.normal();
    return f;
}

void bm_forward(benchmark::State& state) {
    const std::size_t d = 16;
    const ModelParams m = default_model(d);
    const auto f = random_features(d, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(m, f));
    }
}
BENCHMARK(bm_forward);

void bm_loss_and_gradients_batch32(benchmark::State& state) {
    const std::size_t d = 16;
    const std::size_t L = chex().size();
    const ModelParams m = default_model(d);
    Rng rng(3);

    std::vector<std::vector<double>> feats(32), targets(32);
    std::vector<std::vector<std::uint8_t>> masks(32);
    std::vector<TrainExample> batch;
    for (int i = 0; i < 32; ++i) {
        feats[i] = random_features(d, 100 + i);
        targets[i].resize(L);
        masks[i].resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            targets[i][k] = rng.next_double() < 0.3 ? 1.0 : 0.0;
            masks[i][k] = rng.next_double() < 0.9 ? 1 : 0;
        }
        batch.push_back({feats[i], targets[i], masks[i]});
    }
    GradBuffer grads = GradBuffer::zeros_like(m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_gradients(m, batch, &grads));
    }
}
BENCHMARK(bm_loss_and_gradients_batch32);

void bm_roc_auc_10k(benchmark::State& state) {
    Rng rng(4);
    const std::size_t n = 10000;
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.next_double();
        labels[i] = rng.next_double() < 0.5 ? 1 : 0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(roc_auc(scores, labels));
    }
}
BENCHMARK(bm_roc_auc_10k);

void bm_to_unconditional(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> cond(chex().size());
    for (double& v : cond) v = rng.next_double();
    for (auto _ : state) {
        benchmark::DoNotOptimize(to_unconditional(cond, chex()));
    }
}
BENCHMARK(bm_to_unconditional);

void bm_template_match(benchmark::State& state) {
    Rng rng(6);
    GrayImage img;
    img.width = 256;
    img.height = 256;
    img.data.resize(img.width * img.height);
    for (double& v : img.data) v = rng.uniform(0.0, 255.0);

    GrayImage templ;
    templ.width = 224;
    templ.height = 224;
    templ.data.resize(templ.width * templ.height);
    for (std::size_t y = 0; y < templ.height; ++y) {
        for (std::size_t x = 0; x < templ.width; ++x) templ.at(x, y) = img.at(x + 16, y + 16);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(match_template(img, templ));
    }
}
BENCHMARK(bm_template_match);

} // namespace

BENCHMARK_MAIN();
