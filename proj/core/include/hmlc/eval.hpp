#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hmlc/data.hpp"
#include "hmlc/hierarchy.hpp"
#include "hmlc/model.hpp"
#include "hmlc/train.hpp"

namespace hmlc {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;   // (0,0) ... (1,1), fpr nondecreasing
    double auc = 0.0;
};

/// Threshold sweep with tied scores collapsed into single vertices; the
/// trapezoidal area then equals the Mann-Whitney statistic with half credit
/// for ties. Throws ValidationError unless both classes are present,
/// NumericError on non-finite scores.
RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct LabelAuc {
    std::string label;
    double auc = 0.0;               // NaN when only one class is present
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct AucReport {
    std::vector<LabelAuc> per_label;   // hierarchy order

    const LabelAuc& find(const std::string& label) const;
};

/// Per-label AUC of score column k against the raw labels, excluding samples
/// whose raw label is uncertain or missing for that label.
AucReport evaluate_scores(const std::vector<std::vector<double>>& scores, const Dataset& ds,
                          const LabelHierarchy& h);

/// Forward pass + chain product per sample, then evaluate_scores.
AucReport evaluate_model(const ModelParams& m, const Dataset& ds, const LabelHierarchy& h);

/// Arithmetic mean over the subset labels. Throws ValidationError when the
/// subset is empty, names an unknown label, or hits an undefined AUC.
double mean_auc(const AucReport& report, const std::vector<std::string>& subset);

/// Atelectasis, Cardiomegaly, Consolidation, Edema, Pleural Effusion.
const std::vector<std::string>& competition_labels();

struct OperatingPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Number of points lying strictly below the curve. The comparison uses the
/// curve's lower envelope: at a vertical segment the smallest TPR applies, so
/// a point on or touching the curve is never counted. Densifying the curve
/// with collinear vertices does not change the result.
int count_points_below(const RocCurve& curve, std::span<const OperatingPoint> points);

struct AblationRow {
    std::string name;
    PolicyKind kind = PolicyKind::UIgnore;
    bool conditional = false;
};

/// The ten-row policy-by-training grid, named "U-Zeros+CT+LSR" style.
std::vector<AblationRow> default_ablation_matrix();

struct AblationEntry {
    AblationRow row;
    AucReport report;
    double mean = 0.0;
};

struct AblationResult {
    std::vector<AblationEntry> entries;
    std::vector<std::string> subset;
};

/// Trains one model per row (seed derived from the row name) and evaluates it
/// on the validation set over the subset labels.
AblationResult run_ablation(const Dataset& train, const Dataset& val, const LabelHierarchy& h,
                            const std::vector<AblationRow>& rows, const TrainConfig& cfg,
                            const ArchConfig& arch, const std::vector<std::string>& subset);

std::string format_ablation_text(const AblationResult& result);
std::string format_ablation_csv(const AblationResult& result);

} // namespace hmlc
