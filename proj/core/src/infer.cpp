#include "hmlc/infer.hpp"

#include <cstdio>
#include <fstream>

#include "hmlc/errors.hpp"

namespace hmlc {
namespace {

void check_output(const ModelParams& m, const LabelHierarchy& h) {
    if (m.output_dim() != h.size()) {
        throw ValidationError("model emits " + std::to_string(m.output_dim()) +
                              " labels, hierarchy has " + std::to_string(h.size()));
    }
}

std::vector<double> cond_probs_for_image(const ModelParams& m, const GrayImage& img,
                                         const PreprocessConfig& pre) {
    const PreprocessResult prep = preprocess_image(img, pre);
    return forward(m, image_features(prep.image)).cond_probs;
}

} // namespace

std::vector<double> to_unconditional(std::span<const double> cond_probs, const LabelHierarchy& h) {
    if (cond_probs.size() != h.size()) {
        throw ValidationError("conditional probability vector length does not match hierarchy");
    }
    std::vector<double> out(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        double p = 1.0;
        for (std::size_t a : h.root_path(k)) p *= cond_probs[a];
        out[k] = p;
    }
    return out;
}

AffineTransform draw_tta_transform(const TtaConfig& tta, double width, double height, Rng& rng) {
    const bool do_flip = tta.flip && rng.next_double() < 0.5;
    const double angle = rng.uniform(-tta.rotate_deg, tta.rotate_deg);
    const double scale = rng.uniform(1.0 - tta.scale_frac, 1.0 + tta.scale_frac);
    const double shear = rng.uniform(-tta.shear_px, tta.shear_px);

    AffineTransform t = AffineTransform::identity();
    if (do_flip) t = t.then(AffineTransform::flip_x());
    t = t.then(AffineTransform::rotation_deg(angle))
         .then(AffineTransform::scaling(scale, scale))
         .then(AffineTransform::shear_x(shear, height));

    const double cx = (width - 1.0) / 2.0;
    const double cy = (height - 1.0) / 2.0;
    return AffineTransform::translation(-cx, -cy).then(t).then(AffineTransform::translation(cx, cy));
}

UnconditionalPrediction predict_features(const ModelParams& m, std::span<const double> features,
                                         const LabelHierarchy& h) {
    check_output(m, h);
    UnconditionalPrediction p;
    p.probs = to_unconditional(forward(m, features).cond_probs, h);
    return p;
}

UnconditionalPrediction predict_image(const ModelParams& m, const GrayImage& img,
                                      const PreprocessConfig& pre, const LabelHierarchy& h) {
    check_output(m, h);
    UnconditionalPrediction p;
    p.probs = to_unconditional(cond_probs_for_image(m, img, pre), h);
    return p;
}

UnconditionalPrediction predict_tta(const ModelParams& m, const GrayImage& img,
                                    const PreprocessConfig& pre, const TtaConfig& tta,
                                    const LabelHierarchy& h) {
    const ModelParams* one = &m;
    EnsembleInput input;
    input.image = &img;
    input.pre = &pre;
    return ensemble_predict({one, 1}, input, h, tta);
}

UnconditionalPrediction ensemble_predict(std::span<const ModelParams> models,
                                         const EnsembleInput& input, const LabelHierarchy& h,
                                         const std::optional<TtaConfig>& tta) {
    if (models.empty()) throw ValidationError("ensemble needs at least one model");
    for (const auto& m : models) check_output(m, h);

    const bool feature_mode = !input.features.empty();
    if (!feature_mode && (!input.image || !input.pre)) {
        throw ValidationError("ensemble input needs features or an image with preprocess config");
    }
    if (feature_mode && tta) {
        throw ValidationError("test-time augmentation requires image input");
    }
    if (tta && tta->count == 0) throw ValidationError("tta count must be positive");

    // Augmented feature vectors are shared across models, so preprocessing
    // runs count times, not count times per model.
    std::vector<std::vector<double>> feature_sets;
    if (feature_mode) {
        feature_sets.emplace_back(input.features.begin(), input.features.end());
    } else if (!tta) {
        const PreprocessResult prep = preprocess_image(*input.image, *input.pre);
        feature_sets.push_back(image_features(prep.image));
    } else {
        Rng rng(derive_seed(tta->seed, "tta"));
        for (std::size_t t = 0; t < tta->count; ++t) {
            const AffineTransform tf =
                draw_tta_transform(*tta, static_cast<double>(input.image->width),
                                   static_cast<double>(input.image->height), rng);
            const GrayImage warped = warp_affine(*input.image, tf);
            const PreprocessResult prep = preprocess_image(warped, *input.pre);
            feature_sets.push_back(image_features(prep.image));
        }
    }

    const std::size_t L = h.size();
    std::vector<double> mean_cond(L, 0.0);
    for (const ModelParams& m : models) {
        for (const auto& feats : feature_sets) {
            const Prediction p = forward(m, feats);
            for (std::size_t k = 0; k < L; ++k) mean_cond[k] += p.cond_probs[k];
        }
    }
    const double denom = static_cast<double>(models.size() * feature_sets.size());
    for (double& v : mean_cond) v /= denom;

    UnconditionalPrediction out;
    out.probs = to_unconditional(mean_cond, h);
    out.model_count = models.size();
    out.tta_count = tta ? tta->count : 0;
    return out;
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& ids,
                           const std::vector<std::vector<double>>& probs,
                           const std::vector<std::string>& labels) {
    if (ids.size() != probs.size()) {
        throw ValidationError("prediction row count does not match id count");
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open '" + path.string() + "' for writing");

    f << "Id";
    for (const auto& name : labels) f << "," << name;
    f << "\n";
    char buf[32];
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (probs[i].size() != labels.size()) {
            throw ValidationError("prediction row " + std::to_string(i) + " has wrong length");
        }
        f << ids[i];
        for (double v : probs[i]) {
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            f << "," << buf;
        }
        f << "\n";
    }
    if (!f) throw ValidationError("failed writing predictions '" + path.string() + "'");
}

} // namespace hmlc
