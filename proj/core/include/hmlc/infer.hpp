#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmlc/hierarchy.hpp"
#include "hmlc/model.hpp"
#include "hmlc/preprocess.hpp"
#include "hmlc/rng.hpp"

namespace hmlc {

/// Ancestor chain product: out[k] = prod over a in root_path(k) of cond[a].
/// Guarantees child probability <= parent probability.
std::vector<double> to_unconditional(std::span<const double> cond_probs, const LabelHierarchy& h);

struct UnconditionalPrediction {
    std::vector<double> probs;      // hierarchy order
    std::size_t model_count = 1;
    std::size_t tta_count = 0;      // 0 means no augmentation was applied
};

struct TtaConfig {
    std::size_t count = 10;
    bool flip = true;
    double rotate_deg = 7.0;        // rotation ~ U(-rotate_deg, rotate_deg)
    double scale_frac = 0.02;       // scale ~ U(1 - scale_frac, 1 + scale_frac)
    double shear_px = 5.0;          // horizontal shear ~ U(-shear_px, shear_px)
    std::uint64_t seed = 0;
};

/// One random augmentation: flip, rotation, scale, shear composed in that
/// order about the image center. Consumes four draws from rng.
AffineTransform draw_tta_transform(const TtaConfig& tta, double width, double height, Rng& rng);

UnconditionalPrediction predict_features(const ModelParams& m, std::span<const double> features,
                                         const LabelHierarchy& h);

/// Full preprocessing then a forward pass.
UnconditionalPrediction predict_image(const ModelParams& m, const GrayImage& img,
                                      const PreprocessConfig& pre, const LabelHierarchy& h);

/// Applies tta.count random transforms to the original image, preprocesses
/// each, and averages the conditional probabilities before the chain product.
UnconditionalPrediction predict_tta(const ModelParams& m, const GrayImage& img,
                                    const PreprocessConfig& pre, const TtaConfig& tta,
                                    const LabelHierarchy& h);

struct EnsembleInput {
    std::span<const double> features;       // feature mode when non-empty
    const GrayImage* image = nullptr;       // image mode otherwise
    const PreprocessConfig* pre = nullptr;
};

/// Averages conditional probabilities across models (and augmentations when
/// tta is set; every model sees the same augmented inputs), converting to
/// unconditional form exactly once. Throws ValidationError for an empty model
/// list or TTA on feature input.
UnconditionalPrediction ensemble_predict(std::span<const ModelParams> models,
                                         const EnsembleInput& input, const LabelHierarchy& h,
                                         const std::optional<TtaConfig>& tta = std::nullopt);

/// Header Id,<label...>; probabilities with six decimals.
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& ids,
                           const std::vector<std::vector<double>>& probs,
                           const std::vector<std::string>& labels);

} // namespace hmlc
