#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmlc/hierarchy.hpp"
#include "hmlc/policy.hpp"

namespace hmlc {

/// One study: a feature vector or an image reference plus its raw labels.
struct Sample {
    std::string id;
    std::vector<double> features;       // empty in image mode
    std::string image_path;             // empty in feature mode
    std::vector<RawLabel> raw_labels;   // hierarchy order

    enum class View { Unknown, Frontal, Lateral };
    View view = View::Unknown;

    bool has_features() const { return !features.empty(); }
};

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::string> schema;    // identical to the hierarchy's label list

    enum class Source { Csv, Synthetic };
    Source source = Source::Csv;

    // Preserved so save_csv round-trips the input layout exactly.
    std::string id_column = "Path";
    bool has_view_column = false;

    std::size_t size() const { return samples.size(); }
    std::size_t label_count() const { return schema.size(); }
    std::size_t feature_dim() const;    // 0 when no sample carries features
};

enum class ViewFilter { All, FrontalOnly };

/// Standard label CSV: an id column ("Path" or "Id"), an optional
/// "Frontal/Lateral" column, then one column per label with cells
/// 1.0 / 0.0 / -1.0 / empty. Columns are located by name; labels are stored
/// in hierarchy order regardless of file order.
Dataset load_csv(const std::filesystem::path& path, const LabelHierarchy& hierarchy,
                 ViewFilter filter = ViewFilter::All);

/// Inverse of load_csv for cells in {1.0, 0.0, -1.0, empty}.
void save_csv(const std::filesystem::path& path, const Dataset& ds);

/// Feature sidecar: header Id,f0,...,f{d-1}; joined to samples by id.
/// Values are written with 17 significant digits so the round trip is exact.
void load_features_csv(const std::filesystem::path& path, Dataset& ds);
void save_features_csv(const std::filesystem::path& path, const Dataset& ds);

RawLabel raw_label_from_cell(const std::string& cell);
std::string raw_label_to_cell(RawLabel label);

/// Policy-mapped targets for a whole dataset, row-major n x L.
/// Row i is produced by map_labels with the per-sample seed
/// derive_seed(seed, "policy", i), so the matrix is reproducible and
/// independent of iteration order.
struct TargetMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> targets;
    std::vector<std::uint8_t> mask;

    std::span<const double> row_targets(std::size_t i) const {
        return {targets.data() + i * cols, cols};
    }
    std::span<const std::uint8_t> row_mask(std::size_t i) const {
        return {mask.data() + i * cols, cols};
    }
};

TargetMatrix apply_policy(const Dataset& ds, const LabelPolicy& policy, std::uint64_t seed);

/// True where the sample survives the conditional filter: every parent-label
/// target is >= 0.5 ("positive after mapping").
bool all_parents_positive(const TargetMatrix& targets, std::size_t row, const LabelHierarchy& h);

/// Indices of samples retained for conditional (phase-1) training.
std::vector<std::size_t> conditional_indices(const TargetMatrix& targets, const LabelHierarchy& h);

/// Labels trained during phase 1: everything that is not a parent-label
/// (leaves and standalone roots).
std::vector<std::size_t> phase1_scope(const LabelHierarchy& h);

/// Materialized conditional subset plus the phase-1 label scope, by name.
std::pair<Dataset, std::vector<std::string>> conditional_subset(const Dataset& ds,
                                                                const LabelHierarchy& h,
                                                                const LabelPolicy& policy,
                                                                std::uint64_t seed);

/// Linear-sigmoid generative model over the hierarchy. Each node k carries
/// weights w_k and bias b_k; a child can only be positive when its parent is.
struct GroundTruthModel {
    std::size_t feature_dim = 0;
    LabelHierarchy hierarchy;
    std::vector<std::vector<double>> weights;   // per label, length feature_dim
    std::vector<double> bias;

    /// sigmoid(w_k . z + b_k)
    double node_prob(std::size_t k, std::span<const double> z) const;
};

struct SyntheticConfig {
    std::size_t feature_dim = 16;
    std::size_t n = 1000;
    double uncertain_rate = 0.0;           // rho: fraction of cells replaced by -1
    double uncertain_positive_bias = 0.5;  // beta: P(truth positive | replaced)
    double weight_scale = 8.0;             // ~ |w_k|; larger = more separable
    double parent_weight_mix = 0.5;        // child weight = mix * parent + rest fresh
    std::uint64_t seed = 0;
};

/// Node weights are N(0, scale^2/d) entrywise; a child's vector mixes in its
/// parent's (parent_mix in [0, 1)), so related findings share feature
/// directions the way related diseases share signs.
GroundTruthModel make_ground_truth(const LabelHierarchy& h, std::size_t feature_dim,
                                   double weight_scale, std::uint64_t seed,
                                   double parent_mix = 0.5);

/// Samples n studies from the model: z ~ N(0, I) becomes the feature vector,
/// labels are drawn topologically (children forced negative under negative
/// parents), then a Binomial(n, rho) count of cells per label is replaced by
/// -1, each replacement picking a positive-truth cell with probability beta.
/// When truth_out is non-null it receives the pre-injection 0/1 labels,
/// row-major n x L.
Dataset sample_dataset(const GroundTruthModel& gt, std::size_t n, double uncertain_rate,
                       double uncertain_positive_bias, std::uint64_t seed,
                       std::vector<std::uint8_t>* truth_out = nullptr,
                       const std::string& id_prefix = "s");

std::pair<Dataset, GroundTruthModel> generate_synthetic(const LabelHierarchy& h,
                                                        const SyntheticConfig& config);

/// Unconditional Bayes probabilities: per label the product of node_prob
/// along its root path. This is the generator's oracle; it bounds the AUC any
/// trained model can reach on data sampled from gt.
std::vector<double> oracle_scores(const GroundTruthModel& gt, const Sample& sample);

} // namespace hmlc
