#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hmlc/errors.hpp"
#include "hmlc/infer.hpp"
#include "hmlc/rng.hpp"

using namespace hmlc;

namespace {

LabelHierarchy random_forest(Rng& rng, std::size_t max_labels = 12) {
    const std::size_t n = 2 + rng.bounded(max_labels - 1);
    std::ostringstream cfg;
    for (std::size_t k = 0; k < n; ++k) {
        cfg << "L" << k;
        if (k > 0 && rng.next_double() < 0.5) cfg << " <- L" << rng.bounded(k);
        cfg << "\n";
    }
    return LabelHierarchy::parse(cfg.str());
}

ModelParams flat_logit_model(std::size_t in, std::size_t out) {
    ModelParams m;
    Layer l;
    l.in = in;
    l.out = out;
    l.act = Activation::Identity;
    l.w.assign(in * out, 0.0);
    l.b.assign(out, 0.0);
    m.layers = {l};
    return m;
}

GrayImage noise_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.data.resize(w * h);
    Rng rng(seed);
    for (double& v : img.data) v = std::floor(rng.uniform(0.0, 256.0));
    return img;
}

} // namespace

TEST_CASE("the four-node chain example multiplies out exactly") {
    const LabelHierarchy h = LabelHierarchy::parse("A\nB <- A\nC <- B\nD <- B\n");
    const std::vector<double> cond = {0.9, 0.8, 0.5, 0.7};
    const auto un = to_unconditional(cond, h);
    REQUIRE(un.size() == 4);
    CHECK(std::abs(un[0] - 0.9) <= 1e-12);
    CHECK(std::abs(un[1] - 0.72) <= 1e-12);
    CHECK(std::abs(un[2] - 0.36) <= 1e-12);
    CHECK(std::abs(un[3] - 0.504) <= 1e-12);
}

TEST_CASE("children never outrank their parents after the chain product") {
    Rng rng(2718);
    for (int trial = 0; trial < 300; ++trial) {
        const LabelHierarchy h = random_forest(rng);
        std::vector<double> cond(h.size());
        for (double& v : cond) v = rng.next_double();
        const auto un = to_unconditional(cond, h);
        for (std::size_t k = 0; k < h.size(); ++k) {
            const auto p = h.parent(k);
            if (p) CHECK(un[k] <= un[*p]);
            CHECK(un[k] >= 0.0);
            CHECK(un[k] <= 1.0);
        }
    }
}

TEST_CASE("roots pass through the chain product unchanged") {
    const LabelHierarchy h = LabelHierarchy::parse("A\nB\nC\n");
    const std::vector<double> cond = {0.3, 0.9, 0.05};
    CHECK(to_unconditional(cond, h) == cond);
}

TEST_CASE("feature prediction equals forward plus chain product") {
    const LabelHierarchy h = LabelHierarchy::parse("P\nC <- P\n");
    ModelParams m = init_model(3, 2, ArchConfig{{4}}, 11);
    const std::vector<double> x = {0.2, -1.0, 0.5};

    const auto direct = to_unconditional(forward(m, x).cond_probs, h);
    const auto pred = predict_features(m, x, h);
    CHECK(pred.probs == direct);
    CHECK(pred.model_count == 1);
    CHECK(pred.tta_count == 0);
}

TEST_CASE("ensembling averages conditionals before the product") {
    const LabelHierarchy h = LabelHierarchy::parse("P\nC <- P\n");
    ModelParams a = flat_logit_model(1, 2);
    ModelParams b = flat_logit_model(1, 2);
    a.layers[0].b = {std::log(3.0), 0.0};   // cond (0.75, 0.5)
    b.layers[0].b = {0.0, std::log(3.0)};   // cond (0.5, 0.75)

    const std::vector<ModelParams> models = {a, b};
    EnsembleInput input;
    const std::vector<double> x = {0.0};
    input.features = x;

    const auto pred = ensemble_predict(models, input, h);
    // Mean cond = (0.625, 0.625); child = 0.625^2.
    CHECK(pred.probs[0] == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(pred.probs[1] == doctest::Approx(0.625 * 0.625).epsilon(1e-12));
    CHECK(pred.model_count == 2);
}

TEST_CASE("ensemble input validation") {
    const LabelHierarchy h = LabelHierarchy::parse("A\n");
    const std::vector<ModelParams> none;
    EnsembleInput input;
    const std::vector<double> x = {1.0};
    input.features = x;
    CHECK_THROWS_AS(ensemble_predict(none, input, h), ValidationError);

    const std::vector<ModelParams> one = {flat_logit_model(1, 1)};
    TtaConfig tta;
    CHECK_THROWS_WITH_AS(ensemble_predict(one, input, h, tta), doctest::Contains("image"),
                         ValidationError);

    EnsembleInput nothing;
    CHECK_THROWS_AS(ensemble_predict(one, nothing, h), ValidationError);
}

TEST_CASE("augmented prediction is seeded and stays inside the simplex bounds") {
    const LabelHierarchy h = LabelHierarchy::parse("P\nC <- P\n");
    const std::size_t crop = 12;
    ModelParams m = init_model(crop * crop, 2, ArchConfig{{6}}, 3);

    PreprocessConfig pre;
    pre.resize = 16;
    pre.crop = crop;
    const GrayImage img = noise_image(40, 40, 21);

    TtaConfig tta;
    tta.count = 6;
    tta.seed = 5;
    const auto p1 = predict_tta(m, img, pre, tta, h);
    const auto p2 = predict_tta(m, img, pre, tta, h);
    CHECK(p1.probs == p2.probs);
    CHECK(p1.tta_count == 6);

    tta.seed = 6;
    const auto p3 = predict_tta(m, img, pre, tta, h);
    CHECK(p1.probs != p3.probs);

    CHECK(p1.probs[1] <= p1.probs[0]);
    for (double v : p1.probs) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    const auto plain = predict_image(m, img, pre, h);
    CHECK(plain.tta_count == 0);
    CHECK(plain.probs != p1.probs);
}

TEST_CASE("augmentation draws stay inside the configured ranges") {
    TtaConfig tta;
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const AffineTransform t = draw_tta_transform(tta, 64.0, 64.0, rng);
        // The center maps to itself under every draw.
        const auto [cx, cy] = t.apply(31.5, 31.5);
        CHECK(cx == doctest::Approx(31.5).epsilon(1e-9));
        CHECK(cy == doctest::Approx(31.5).epsilon(1e-9));
        // Determinant magnitude equals the squared scale, inside [0.98, 1.02]^2.
        const double det = t.m[0] * t.m[4] - t.m[1] * t.m[3];
        CHECK(std::abs(det) >= 0.98 * 0.98 - 1e-9);
        CHECK(std::abs(det) <= 1.02 * 1.02 + 1e-9);
    }
}

TEST_CASE("prediction csv uses six decimals") {
    const auto p = std::filesystem::temp_directory_path() / "preds.csv";
    write_predictions_csv(p, {"a", "b"}, {{0.5, 0.123456789}, {1.0, 0.0}}, {"X", "Y"});
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    CHECK(line == "Id,X,Y");
    std::getline(f, line);
    CHECK(line == "a,0.500000,0.123457");
    std::getline(f, line);
    CHECK(line == "b,1.000000,0.000000");

    CHECK_THROWS_AS(write_predictions_csv(p, {"a"}, {{0.1}, {0.2}}, {"X"}), ValidationError);
}
