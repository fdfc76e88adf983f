#include "hmlc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "hmlc/csv.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/rng.hpp"

namespace hmlc {
namespace {

constexpr const char* kViewColumn = "Frontal/Lateral";

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::size_t Dataset::feature_dim() const {
    for (const auto& s : samples) {
        if (s.has_features()) return s.features.size();
    }
    return 0;
}

RawLabel raw_label_from_cell(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return RawLabel::Missing;
    if (t == "1.0" || t == "1") return RawLabel::Positive;
    if (t == "0.0" || t == "0") return RawLabel::Negative;
    if (t == "-1.0" || t == "-1") return RawLabel::Uncertain;
    throw ValidationError("unrecognized label cell '" + cell + "' (expected 1.0, 0.0, -1.0 or empty)");
}

std::string raw_label_to_cell(RawLabel label) {
    switch (label) {
        case RawLabel::Positive: return "1.0";
        case RawLabel::Negative: return "0.0";
        case RawLabel::Uncertain: return "-1.0";
        case RawLabel::Missing: return "";
    }
    throw ValidationError("invalid raw label value");
}

Dataset load_csv(const std::filesystem::path& path, const LabelHierarchy& hierarchy,
                 ViewFilter filter) {
    const CsvTable table = read_csv(path);

    std::size_t id_col = 0;
    std::string id_name;
    if (table.has_column("Path")) {
        id_col = table.column("Path");
        id_name = "Path";
    } else if (table.has_column("Id")) {
        id_col = table.column("Id");
        id_name = "Id";
    } else {
        throw ValidationError(path.string() + ": missing id column (need 'Path' or 'Id')");
    }

    std::optional<std::size_t> view_col;
    if (table.has_column(kViewColumn)) view_col = table.column(kViewColumn);

    std::vector<std::size_t> label_cols(hierarchy.size());
    for (std::size_t k = 0; k < hierarchy.size(); ++k) {
        const std::string& name = hierarchy.label(k);
        if (!table.has_column(name)) {
            throw ValidationError(path.string() + ": missing label column '" + name + "'");
        }
        label_cols[k] = table.column(name);
    }

    Dataset ds;
    ds.schema = hierarchy.labels();
    ds.source = Dataset::Source::Csv;
    ds.id_column = id_name;
    ds.has_view_column = view_col.has_value();
    ds.samples.reserve(table.rows.size());

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        Sample s;
        s.id = trim(row[id_col]);
        s.image_path = s.id;
        if (view_col) {
            const std::string v = trim(row[*view_col]);
            if (v == "Frontal") s.view = Sample::View::Frontal;
            else if (v == "Lateral") s.view = Sample::View::Lateral;
            else if (v.empty()) s.view = Sample::View::Unknown;
            else throw ValidationError(path.string() + " row " + std::to_string(r + 2) +
                                       ": unrecognized view '" + v + "'");
        }
        s.raw_labels.resize(hierarchy.size());
        for (std::size_t k = 0; k < hierarchy.size(); ++k) {
            try {
                s.raw_labels[k] = raw_label_from_cell(row[label_cols[k]]);
            } catch (const ValidationError& e) {
                throw ValidationError(path.string() + " row " + std::to_string(r + 2) +
                                      ", column '" + hierarchy.label(k) + "': " + e.what());
            }
        }
        if (filter == ViewFilter::FrontalOnly && s.view != Sample::View::Frontal) continue;
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
    CsvTable table;
    table.header.push_back(ds.id_column);
    if (ds.has_view_column) table.header.push_back(kViewColumn);
    for (const auto& name : ds.schema) table.header.push_back(name);

    table.rows.reserve(ds.samples.size());
    for (const auto& s : ds.samples) {
        std::vector<std::string> row;
        row.reserve(table.header.size());
        row.push_back(s.id);
        if (ds.has_view_column) {
            switch (s.view) {
                case Sample::View::Frontal: row.push_back("Frontal"); break;
                case Sample::View::Lateral: row.push_back("Lateral"); break;
                case Sample::View::Unknown: row.push_back(""); break;
            }
        }
        for (RawLabel l : s.raw_labels) row.push_back(raw_label_to_cell(l));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

void load_features_csv(const std::filesystem::path& path, Dataset& ds) {
    const CsvTable table = read_csv(path);
    if (!table.has_column("Id")) {
        throw ValidationError(path.string() + ": feature file needs an 'Id' column");
    }
    const std::size_t id_col = table.column("Id");
    const std::size_t dim = table.header.size() - 1;
    if (dim == 0) throw ValidationError(path.string() + ": feature file has no feature columns");

    std::unordered_map<std::string, std::vector<double>> by_id;
    by_id.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::vector<double> feats;
        feats.reserve(dim);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == id_col) continue;
            try {
                feats.push_back(std::stod(row[c]));
            } catch (const std::exception&) {
                throw ValidationError(path.string() + " row " + std::to_string(r + 2) +
                                      ": unparseable feature value '" + row[c] + "'");
            }
        }
        by_id.emplace(trim(row[id_col]), std::move(feats));
    }

    for (auto& s : ds.samples) {
        auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            throw ValidationError(path.string() + ": no feature row for sample '" + s.id + "'");
        }
        s.features = it->second;
    }
}

void save_features_csv(const std::filesystem::path& path, const Dataset& ds) {
    const std::size_t dim = ds.feature_dim();
    if (dim == 0) throw ValidationError("dataset has no features to save");

    CsvTable table;
    table.header.push_back("Id");
    for (std::size_t j = 0; j < dim; ++j) table.header.push_back("f" + std::to_string(j));

    for (const auto& s : ds.samples) {
        if (s.features.size() != dim) {
            throw ValidationError("sample '" + s.id + "' has inconsistent feature dimension");
        }
        std::vector<std::string> row;
        row.reserve(dim + 1);
        row.push_back(s.id);
        for (double v : s.features) row.push_back(format_full(v));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

TargetMatrix apply_policy(const Dataset& ds, const LabelPolicy& policy, std::uint64_t seed) {
    policy.validate();
    const std::size_t n = ds.size();
    const std::size_t L = ds.label_count();

    TargetMatrix tm;
    tm.rows = n;
    tm.cols = L;
    tm.targets.resize(n * L);
    tm.mask.resize(n * L);

    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, "policy", i));
        const MappedTargets mapped = map_labels(ds.samples[i].raw_labels, policy, rng);
        std::copy(mapped.targets.begin(), mapped.targets.end(), tm.targets.begin() + i * L);
        std::copy(mapped.mask.begin(), mapped.mask.end(), tm.mask.begin() + i * L);
    }
    return tm;
}

bool all_parents_positive(const TargetMatrix& targets, std::size_t row, const LabelHierarchy& h) {
    for (std::size_t k : h.parent_labels()) {
        if (targets.targets[row * targets.cols + k] < 0.5) return false;
    }
    return true;
}

std::vector<std::size_t> conditional_indices(const TargetMatrix& targets, const LabelHierarchy& h) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < targets.rows; ++i) {
        if (all_parents_positive(targets, i, h)) keep.push_back(i);
    }
    return keep;
}

std::vector<std::size_t> phase1_scope(const LabelHierarchy& h) {
    std::vector<std::size_t> scope;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!h.is_parent_label(k)) scope.push_back(k);
    }
    return scope;
}

std::pair<Dataset, std::vector<std::string>> conditional_subset(const Dataset& ds,
                                                                const LabelHierarchy& h,
                                                                const LabelPolicy& policy,
                                                                std::uint64_t seed) {
    const TargetMatrix tm = apply_policy(ds, policy, seed);
    const std::vector<std::size_t> keep = conditional_indices(tm, h);

    Dataset subset;
    subset.schema = ds.schema;
    subset.source = ds.source;
    subset.id_column = ds.id_column;
    subset.has_view_column = ds.has_view_column;
    subset.samples.reserve(keep.size());
    for (std::size_t i : keep) subset.samples.push_back(ds.samples[i]);

    std::vector<std::string> scope_names;
    for (std::size_t k : phase1_scope(h)) scope_names.push_back(h.label(k));
    return {std::move(subset), std::move(scope_names)};
}

double GroundTruthModel::node_prob(std::size_t k, std::span<const double> z) const {
    if (z.size() != feature_dim) {
        throw ValidationError("feature vector has dimension " + std::to_string(z.size()) +
                              ", model expects " + std::to_string(feature_dim));
    }
    double acc = bias[k];
    const auto& w = weights[k];
    for (std::size_t j = 0; j < feature_dim; ++j) acc += w[j] * z[j];
    return 1.0 / (1.0 + std::exp(-acc));
}

namespace {

/// Parents before children regardless of declaration order.
std::vector<std::size_t> topological_order(const LabelHierarchy& h) {
    std::vector<std::size_t> order(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return h.root_path(a).size() < h.root_path(b).size();
    });
    return order;
}

} // namespace

GroundTruthModel make_ground_truth(const LabelHierarchy& h, std::size_t feature_dim,
                                   double weight_scale, std::uint64_t seed, double parent_mix) {
    if (feature_dim == 0) throw ValidationError("feature_dim must be positive");
    if (parent_mix < 0.0 || parent_mix >= 1.0) {
        throw ValidationError("parent_mix must lie in [0, 1)");
    }

    GroundTruthModel gt;
    gt.feature_dim = feature_dim;
    gt.hierarchy = h;
    gt.weights.resize(h.size());
    gt.bias.resize(h.size());

    const double sd = weight_scale / std::sqrt(static_cast<double>(feature_dim));
    const double fresh_scale = std::sqrt(1.0 - parent_mix * parent_mix);
    for (std::size_t k : topological_order(h)) {
        Rng rng(derive_seed(seed, "gt-node", k));
        auto& w = gt.weights[k];
        w.resize(feature_dim);
        for (std::size_t j = 0; j < feature_dim; ++j) w[j] = sd * rng.normal();
        const auto p = h.parent(k);
        if (p) {
            const auto& pw = gt.weights[*p];
            for (std::size_t j = 0; j < feature_dim; ++j) {
                w[j] = parent_mix * pw[j] + fresh_scale * w[j];
            }
        }
        gt.bias[k] = rng.uniform(-0.5, 0.5);
    }
    return gt;
}

Dataset sample_dataset(const GroundTruthModel& gt, std::size_t n, double uncertain_rate,
                       double uncertain_positive_bias, std::uint64_t seed,
                       std::vector<std::uint8_t>* truth_out, const std::string& id_prefix) {
    if (uncertain_rate < 0.0 || uncertain_rate > 1.0) {
        throw ValidationError("uncertain_rate must lie in [0, 1]");
    }
    if (uncertain_positive_bias < 0.0 || uncertain_positive_bias > 1.0) {
        throw ValidationError("uncertain_positive_bias must lie in [0, 1]");
    }

    const LabelHierarchy& h = gt.hierarchy;
    const std::size_t L = h.size();
    const std::vector<std::size_t> topo = topological_order(h);

    Dataset ds;
    ds.schema = h.labels();
    ds.source = Dataset::Source::Synthetic;
    ds.id_column = "Id";
    ds.samples.resize(n);

    std::vector<std::uint8_t> truth(n * L, 0);

    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, "sample", i));
        Sample& s = ds.samples[i];
        s.id = id_prefix + std::to_string(i);
        s.features.resize(gt.feature_dim);
        for (std::size_t j = 0; j < gt.feature_dim; ++j) s.features[j] = rng.normal();

        s.raw_labels.assign(L, RawLabel::Negative);
        for (std::size_t k : topo) {
            const auto p = h.parent(k);
            if (p && truth[i * L + *p] == 0) continue;
            const double prob = gt.node_prob(k, s.features);
            if (rng.next_double() < prob) {
                truth[i * L + k] = 1;
                s.raw_labels[k] = RawLabel::Positive;
            }
        }
    }

    // Uncertainty injection, one label column at a time. The replacement
    // count is Binomial(n, rate); each replacement flips a beta-coin to pick
    // from the positive-truth or negative-truth pool, falling back to the
    // other pool when its own is exhausted. rate=1 blanks the whole column.
    if (uncertain_rate > 0.0 && n > 0) {
        for (std::size_t k = 0; k < L; ++k) {
            Rng rng(derive_seed(seed, "inject", k));
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (rng.next_double() < uncertain_rate) ++count;
            }
            std::vector<std::size_t> pos_pool;
            std::vector<std::size_t> neg_pool;
            for (std::size_t i = 0; i < n; ++i) {
                (truth[i * L + k] ? pos_pool : neg_pool).push_back(i);
            }
            for (std::size_t c = 0; c < count; ++c) {
                const bool want_pos = rng.next_double() < uncertain_positive_bias;
                auto& pool = want_pos ? (pos_pool.empty() ? neg_pool : pos_pool)
                                      : (neg_pool.empty() ? pos_pool : neg_pool);
                if (pool.empty()) break;
                const std::size_t slot = rng.bounded(pool.size());
                const std::size_t i = pool[slot];
                pool[slot] = pool.back();
                pool.pop_back();
                ds.samples[i].raw_labels[k] = RawLabel::Uncertain;
            }
        }
    }

    if (truth_out) *truth_out = std::move(truth);
    return ds;
}

std::pair<Dataset, GroundTruthModel> generate_synthetic(const LabelHierarchy& h,
                                                        const SyntheticConfig& config) {
    GroundTruthModel gt = make_ground_truth(h, config.feature_dim, config.weight_scale,
                                            derive_seed(config.seed, "ground-truth"),
                                            config.parent_weight_mix);
    Dataset ds = sample_dataset(gt, config.n, config.uncertain_rate,
                                config.uncertain_positive_bias,
                                derive_seed(config.seed, "dataset"));
    return {std::move(ds), std::move(gt)};
}

std::vector<double> oracle_scores(const GroundTruthModel& gt, const Sample& sample) {
    const LabelHierarchy& h = gt.hierarchy;
    std::vector<double> node(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) node[k] = gt.node_prob(k, sample.features);

    std::vector<double> scores(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        double p = 1.0;
        for (std::size_t a : h.root_path(k)) p *= node[a];
        scores[k] = p;
    }
    return scores;
}

} // namespace hmlc
