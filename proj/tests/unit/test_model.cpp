#include <doctest.h>

#include <cmath>
#include <vector>

#include "hmlc/errors.hpp"
#include "hmlc/model.hpp"
#include "hmlc/rng.hpp"

using namespace hmlc;

namespace {

ModelParams tiny_model(std::uint64_t seed, std::size_t in = 3, std::size_t out = 2) {
    ArchConfig arch;
    arch.hidden = {4};
    return init_model(in, out, arch, seed);
}

struct Batch {
    std::vector<std::vector<double>> f, t;
    std::vector<std::vector<std::uint8_t>> m;
    std::vector<TrainExample> ex;

    void add(std::vector<double> feats, std::vector<double> targets,
             std::vector<std::uint8_t> mask) {
        f.push_back(std::move(feats));
        t.push_back(std::move(targets));
        m.push_back(std::move(mask));
    }
    std::span<const TrainExample> view() {
        ex.clear();
        for (std::size_t i = 0; i < f.size(); ++i) ex.push_back({f[i], t[i], m[i]});
        return ex;
    }
};

double numeric_grad(ModelParams& m, std::span<const TrainExample> batch, double* param) {
    const double h = 1e-6;
    const double orig = *param;
    *param = orig + h;
    const double up = loss_and_gradients(m, batch, nullptr);
    *param = orig - h;
    const double down = loss_and_gradients(m, batch, nullptr);
    *param = orig;
    return (up - down) / (2.0 * h);
}

} // namespace

TEST_CASE("initialization is seed-deterministic and bounded") {
    const ModelParams a = tiny_model(42);
    const ModelParams b = tiny_model(42);
    const ModelParams c = tiny_model(43);
    REQUIRE(a.layers.size() == 2);
    CHECK(a.layers[0].w == b.layers[0].w);
    CHECK(a.layers[0].w != c.layers[0].w);
    CHECK(a.layers[0].act == Activation::Relu);
    CHECK(a.layers[1].act == Activation::Identity);

    const double bound = 1.0 / std::sqrt(3.0);
    for (double w : a.layers[0].w) {
        CHECK(w >= -bound);
        CHECK(w <= bound);
    }
    for (double bias : a.layers[0].b) CHECK(bias == 0.0);
}

TEST_CASE("forward computes an explicit two-layer network by hand") {
    ModelParams m;
    Layer l0;
    l0.in = 2;
    l0.out = 2;
    l0.act = Activation::Relu;
    l0.w = {1.0, -1.0, 0.5, 0.5};
    l0.b = {0.0, -1.0};
    Layer l1;
    l1.in = 2;
    l1.out = 1;
    l1.act = Activation::Identity;
    l1.w = {2.0, 1.0};
    l1.b = {0.25};
    m.layers = {l0, l1};

    const std::vector<double> x = {3.0, 1.0};
    // hidden = relu(3-1), relu(1.5+0.5-1) = (2, 1); logit = 4 + 1 + 0.25
    const Prediction p = forward(m, x);
    REQUIRE(p.logits.size() == 1);
    CHECK(p.logits[0] == doctest::Approx(5.25).epsilon(1e-15));
    CHECK(p.cond_probs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-5.25))).epsilon(1e-15));
}

TEST_CASE("sigmoid of log 3 is three quarters") {
    ModelParams m;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.act = Activation::Identity;
    l.w = {1.0};
    l.b = {0.0};
    m.layers = {l};
    const Prediction p = forward(m, std::vector<double>{std::log(3.0)});
    CHECK(p.cond_probs[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("loss at probability one half with a positive target is log two") {
    ModelParams m;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.act = Activation::Identity;
    l.w = {0.0};
    l.b = {0.0};
    m.layers = {l};

    Batch b;
    b.add({1.0}, {1.0}, {1});
    const double loss = loss_and_gradients(m, b.view(), nullptr);
    CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("masked entries contribute neither loss nor gradient") {
    ModelParams m = tiny_model(7);
    Batch masked;
    masked.add({0.3, -0.2, 0.9}, {1.0, 0.0}, {1, 0});
    Batch reduced;
    reduced.add({0.3, -0.2, 0.9}, {1.0, 0.5}, {1, 0});

    GradBuffer g1 = GradBuffer::zeros_like(m);
    GradBuffer g2 = GradBuffer::zeros_like(m);
    const double a = loss_and_gradients(m, masked.view(), &g1);
    const double b = loss_and_gradients(m, reduced.view(), &g2);
    CHECK(a == b);
    CHECK(g1.w == g2.w);
    CHECK(g1.b == g2.b);

    Batch all_masked;
    all_masked.add({0.3, -0.2, 0.9}, {1.0, 0.0}, {0, 0});
    GradBuffer g3 = GradBuffer::zeros_like(m);
    CHECK(loss_and_gradients(m, all_masked.view(), &g3) == 0.0);
    for (const auto& v : g3.w) {
        for (double x : v) CHECK(x == 0.0);
    }
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        ModelParams m = tiny_model(100 + trial);
        Batch batch;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> f(3), t(2);
            std::vector<std::uint8_t> mask(2);
            for (auto& v : f) v = rng.normal();
            for (auto& v : t) v = rng.next_double();
            for (auto& v : mask) v = rng.next_double() < 0.7 ? 1 : 0;
            batch.add(f, t, mask);
        }
        GradBuffer g = GradBuffer::zeros_like(m);
        loss_and_gradients(m, batch.view(), &g);

        for (std::size_t l = 0; l < m.layers.size(); ++l) {
            for (std::size_t j = 0; j < m.layers[l].w.size(); j += 3) {
                const double num = numeric_grad(m, batch.view(), &m.layers[l].w[j]);
                CHECK(g.w[l][j] == doctest::Approx(num).epsilon(1e-4));
            }
            const double num_b = numeric_grad(m, batch.view(), &m.layers[l].b[0]);
            CHECK(g.b[l][0] == doctest::Approx(num_b).epsilon(1e-4));
        }
    }
}

TEST_CASE("shape errors and empty batches are rejected") {
    ModelParams m = tiny_model(1);
    CHECK_THROWS_AS(forward(m, std::vector<double>{1.0}), ValidationError);
    CHECK_THROWS_AS(loss_and_gradients(m, {}, nullptr), ValidationError);

    Batch bad;
    bad.add({0.1, 0.2, 0.3}, {1.0}, {1});
    CHECK_THROWS_AS(loss_and_gradients(m, bad.view(), nullptr), ValidationError);
}

TEST_CASE("saturated logits trip the numeric guard") {
    ModelParams m;
    Layer l;
    l.in = 1;
    l.out = 1;
    l.act = Activation::Identity;
    l.w = {10000.0};
    l.b = {0.0};
    m.layers = {l};

    Batch b;
    b.add({1.0}, {0.0}, {1});   // p == 1.0 exactly, log(1-p) = -inf
    CHECK_THROWS_AS(loss_and_gradients(m, b.view(), nullptr), NumericError);
}
