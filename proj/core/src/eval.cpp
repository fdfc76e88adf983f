#include "hmlc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "hmlc/errors.hpp"
#include "hmlc/infer.hpp"
#include "hmlc/rng.hpp"

namespace hmlc {
namespace {

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.empty()) throw ValidationError("roc_auc needs at least one instance");
    if (scores.size() != labels.size()) {
        throw ValidationError("roc_auc score and label counts differ");
    }

    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!std::isfinite(scores[i])) throw NumericError("roc_auc score is not finite");
        if (labels[i] == 1) ++pos;
        else if (labels[i] == 0) ++neg;
        else throw ValidationError("roc_auc labels must be 0 or 1");
    }
    if (pos == 0 || neg == 0) {
        throw ValidationError("roc_auc needs both a positive and a negative instance");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // One vertex per distinct score, so ties move diagonally in one step.
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }

    double area = 0.0;
    for (std::size_t j = 1; j < curve.points.size(); ++j) {
        const auto& a = curve.points[j - 1];
        const auto& b = curve.points[j];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    curve.auc = area;
    return curve;
}

const LabelAuc& AucReport::find(const std::string& label) const {
    for (const auto& e : per_label) {
        if (e.label == label) return e;
    }
    throw ValidationError("no AUC entry for label '" + label + "'");
}

AucReport evaluate_scores(const std::vector<std::vector<double>>& scores, const Dataset& ds,
                          const LabelHierarchy& h) {
    if (scores.size() != ds.size()) {
        throw ValidationError("score row count does not match dataset size");
    }
    AucReport report;
    report.per_label.reserve(h.size());

    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (std::size_t k = 0; k < h.size(); ++k) {
        s.clear();
        y.clear();
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const RawLabel raw = ds.samples[i].raw_labels[k];
            if (raw != RawLabel::Positive && raw != RawLabel::Negative) continue;
            if (scores[i].size() != h.size()) {
                throw ValidationError("score row " + std::to_string(i) + " has wrong length");
            }
            s.push_back(scores[i][k]);
            y.push_back(raw == RawLabel::Positive ? 1 : 0);
        }
        LabelAuc entry;
        entry.label = h.label(k);
        entry.n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
        entry.n_neg = y.size() - entry.n_pos;
        entry.auc = (entry.n_pos == 0 || entry.n_neg == 0)
                        ? std::numeric_limits<double>::quiet_NaN()
                        : roc_auc(s, y).auc;
        report.per_label.push_back(std::move(entry));
    }
    return report;
}

AucReport evaluate_model(const ModelParams& m, const Dataset& ds, const LabelHierarchy& h) {
    std::vector<std::vector<double>> scores;
    scores.reserve(ds.size());
    for (const auto& sample : ds.samples) {
        if (!sample.has_features()) {
            throw ValidationError("sample '" + sample.id + "' has no features to evaluate");
        }
        scores.push_back(to_unconditional(forward(m, sample.features).cond_probs, h));
    }
    return evaluate_scores(scores, ds, h);
}

double mean_auc(const AucReport& report, const std::vector<std::string>& subset) {
    if (subset.empty()) throw ValidationError("mean AUC over an empty label subset");
    double sum = 0.0;
    for (const auto& name : subset) {
        const LabelAuc& e = report.find(name);
        if (std::isnan(e.auc)) {
            throw ValidationError("label '" + name + "' has undefined AUC (" +
                                  std::to_string(e.n_pos) + " positives, " +
                                  std::to_string(e.n_neg) + " negatives)");
        }
        sum += e.auc;
    }
    return sum / static_cast<double>(subset.size());
}

const std::vector<std::string>& competition_labels() {
    static const std::vector<std::string> kLabels = {
        "Atelectasis", "Cardiomegaly", "Consolidation", "Edema", "Pleural Effusion",
    };
    return kLabels;
}

int count_points_below(const RocCurve& curve, std::span<const OperatingPoint> points) {
    if (curve.points.size() < 2) throw ValidationError("curve has too few vertices");

    // Collapse each distinct fpr to its lowest and highest tpr. Vertices come
    // fpr-sorted from the sweep; equal fprs form the vertical segments.
    struct Knot {
        double fpr, lo, hi;
    };
    std::vector<Knot> knots;
    for (const auto& p : curve.points) {
        if (!knots.empty() && p.fpr == knots.back().fpr) {
            knots.back().lo = std::min(knots.back().lo, p.tpr);
            knots.back().hi = std::max(knots.back().hi, p.tpr);
        } else {
            if (!knots.empty() && p.fpr < knots.back().fpr) {
                throw ValidationError("curve vertices are not sorted by fpr");
            }
            knots.push_back({p.fpr, p.tpr, p.tpr});
        }
    }

    int below = 0;
    for (const auto& pt : points) {
        if (pt.fpr < 0.0 || pt.fpr > 1.0 || pt.tpr < 0.0 || pt.tpr > 1.0) {
            throw ValidationError("operating point outside the unit square");
        }
        auto it = std::lower_bound(knots.begin(), knots.end(), pt.fpr,
                                   [](const Knot& k, double x) { return k.fpr < x; });
        if (it == knots.end() || (it == knots.begin() && it->fpr != pt.fpr)) {
            throw ValidationError("curve does not cover the operating point's fpr");
        }
        double envelope;
        if (it->fpr == pt.fpr) {
            envelope = it->lo;
        } else {
            // Strictly between two knots: the curve there is the segment from
            // the left knot's top vertex to the right knot's bottom vertex.
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            const double t = (pt.fpr - left.fpr) / (right.fpr - left.fpr);
            envelope = left.hi + t * (right.lo - left.hi);
        }
        if (pt.tpr < envelope) ++below;
    }
    return below;
}

std::vector<AblationRow> default_ablation_matrix() {
    return {
        {"U-Ignore", PolicyKind::UIgnore, false},
        {"U-Ignore+CT", PolicyKind::UIgnore, true},
        {"U-Zeros", PolicyKind::UZeros, false},
        {"U-Zeros+CT", PolicyKind::UZeros, true},
        {"U-Zeros+LSR", PolicyKind::UZerosLsr, false},
        {"U-Zeros+CT+LSR", PolicyKind::UZerosLsr, true},
        {"U-Ones", PolicyKind::UOnes, false},
        {"U-Ones+CT", PolicyKind::UOnes, true},
        {"U-Ones+LSR", PolicyKind::UOnesLsr, false},
        {"U-Ones+CT+LSR", PolicyKind::UOnesLsr, true},
    };
}

AblationResult run_ablation(const Dataset& train, const Dataset& val, const LabelHierarchy& h,
                            const std::vector<AblationRow>& rows, const TrainConfig& cfg,
                            const ArchConfig& arch, const std::vector<std::string>& subset) {
    if (rows.empty()) throw ValidationError("ablation needs at least one row");

    AblationResult result;
    result.subset = subset;
    for (const AblationRow& row : rows) {
        const LabelPolicy policy = LabelPolicy::make(row.kind);
        TrainConfig row_cfg = cfg;
        row_cfg.seed = derive_seed(cfg.seed, row.name);
        const TrainResult trained = row.conditional
                                        ? train_two_phase(train, h, policy, row_cfg, arch)
                                        : train_flat(train, h, policy, row_cfg, arch);
        AblationEntry entry;
        entry.row = row;
        entry.report = evaluate_model(trained.model, val, h);
        entry.mean = mean_auc(entry.report, subset);
        result.entries.push_back(std::move(entry));
    }
    return result;
}

std::string format_ablation_text(const AblationResult& result) {
    std::size_t name_w = 6;
    for (const auto& e : result.entries) name_w = std::max(name_w, e.row.name.size());

    std::ostringstream out;
    out << "policy";
    out << std::string(name_w - 6, ' ') << "  mean AUC";
    for (const auto& label : result.subset) out << "  " << label;
    out << "\n";
    for (const auto& e : result.entries) {
        out << e.row.name << std::string(name_w - e.row.name.size(), ' ');
        out << "  " << fixed(e.mean, 4) << "    ";
        for (const auto& label : result.subset) {
            const std::string s = fixed(e.report.find(label).auc, 4);
            out << "  " << s << std::string(label.size() > s.size() ? label.size() - s.size() : 0, ' ');
        }
        out << "\n";
    }
    return out.str();
}

std::string format_ablation_csv(const AblationResult& result) {
    std::ostringstream out;
    out << "policy,mean_auc";
    for (const auto& label : result.subset) out << "," << label;
    out << "\n";
    for (const auto& e : result.entries) {
        out << e.row.name << "," << fixed(e.mean, 6);
        for (const auto& label : result.subset) out << "," << fixed(e.report.find(label).auc, 6);
        out << "\n";
    }
    return out.str();
}

} // namespace hmlc
