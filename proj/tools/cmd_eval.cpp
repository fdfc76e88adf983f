#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "cli_common.hpp"
#include "hmlc/csv.hpp"
#include "hmlc/errors.hpp"
#include "hmlc/eval.hpp"

namespace hmlc::cli {

namespace {

struct EvalOptions {
    std::string pred;
    std::string data;
    std::string out;
    std::string csv_out;
    std::string rad_points;
    std::vector<std::string> subset;
    HierarchyOpt hierarchy;
};

std::vector<std::vector<double>> aligned_scores(const CsvTable& table, const Dataset& ds,
                                                const LabelHierarchy& h,
                                                const std::string& file) {
    const std::size_t id_col = table.column("Id");
    std::vector<std::size_t> label_cols;
    for (const auto& label : h.labels()) label_cols.push_back(table.column(label));

    std::map<std::string, std::size_t> by_id;
    for (std::size_t r = 0; r < table.rows.size(); ++r) by_id[table.rows[r][id_col]] = r;

    std::vector<std::vector<double>> scores;
    for (const auto& s : ds.samples) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end())
            throw ValidationError("no prediction row for id '" + s.id + "' in " + file);
        std::vector<double> row;
        for (std::size_t c : label_cols) {
            try {
                row.push_back(std::stod(table.rows[it->second][c]));
            } catch (const std::exception&) {
                throw ValidationError("bad score for id '" + s.id + "' in " + file + ": " +
                                      table.rows[it->second][c]);
            }
        }
        scores.push_back(std::move(row));
    }
    return scores;
}

struct RadPoint {
    std::string label;
    OperatingPoint point;
};

std::vector<RadPoint> read_rad_points(const std::string& file) {
    const CsvTable table = read_csv(file);
    auto col = [&](const char* lower, const char* upper) {
        if (table.has_column(lower)) return table.column(lower);
        return table.column(upper);
    };
    const std::size_t label_col = col("label", "Label");
    const std::size_t fpr_col = col("fpr", "FPR");
    const std::size_t tpr_col = col("tpr", "TPR");
    std::vector<RadPoint> points;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        RadPoint p;
        p.label = table.rows[r][label_col];
        try {
            p.point.fpr = std::stod(table.rows[r][fpr_col]);
            p.point.tpr = std::stod(table.rows[r][tpr_col]);
        } catch (const std::exception&) {
            throw ValidationError("bad operating point in row " + std::to_string(r + 2) + " of " +
                                  file);
        }
        points.push_back(std::move(p));
    }
    return points;
}

void run_eval(const EvalOptions& opt) {
    RunManifest manifest;
    manifest.subcommand = "eval";

    const LabelHierarchy h = opt.hierarchy.resolve(manifest);
    const std::vector<std::string> subset =
        opt.subset.empty() ? competition_labels() : trimmed(opt.subset);
    manifest.config["subset"] = subset;

    const Dataset ds = load_csv(opt.data, h);
    const CsvTable pred = read_csv(opt.pred);
    manifest.add_input(opt.data);
    manifest.add_input(opt.pred);

    const std::vector<std::vector<double>> scores = aligned_scores(pred, ds, h, opt.pred);
    const AucReport report = evaluate_scores(scores, ds, h);
    const double mean = mean_auc(report, subset);

    std::ostringstream text;
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %10s %6s %6s\n", "label", "AUC", "pos", "neg");
    text << line;
    for (const auto& la : report.per_label) {
        if (std::isnan(la.auc))
            std::snprintf(line, sizeof line, "%-28s %10s %6zu %6zu\n", la.label.c_str(),
                          "undefined", la.n_pos, la.n_neg);
        else
            std::snprintf(line, sizeof line, "%-28s %10.4f %6zu %6zu\n", la.label.c_str(), la.auc,
                          la.n_pos, la.n_neg);
        text << line;
    }
    std::snprintf(line, sizeof line, "\nmean AUC over %zu labels: %.4f\n", subset.size(), mean);
    text << line;

    if (!opt.rad_points.empty()) {
        manifest.add_input(opt.rad_points);
        const std::vector<RadPoint> points = read_rad_points(opt.rad_points);
        text << "\n";
        for (const auto& label : h.labels()) {
            std::vector<OperatingPoint> ours;
            for (const auto& p : points)
                if (p.label == label) ours.push_back(p.point);
            if (ours.empty()) continue;

            std::vector<double> s;
            std::vector<std::uint8_t> y;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                const RawLabel raw = ds.samples[i].raw_labels[h.index_of(label)];
                if (raw == RawLabel::Positive || raw == RawLabel::Negative) {
                    s.push_back(scores[i][h.index_of(label)]);
                    y.push_back(raw == RawLabel::Positive ? 1 : 0);
                }
            }
            const RocCurve curve = roc_auc(s, y);
            const int below = count_points_below(curve, ours);
            std::snprintf(line, sizeof line, "%s: %d of %zu operating points below the curve\n",
                          label.c_str(), below, ours.size());
            text << line;
        }
    }

    std::fputs(text.str().c_str(), stdout);
    std::ofstream out_file(opt.out, std::ios::binary);
    if (!out_file) throw ValidationError("cannot write report: " + opt.out);
    out_file << text.str();
    out_file.close();
    manifest.add_output(opt.out);

    if (!opt.csv_out.empty()) {
        std::ofstream csv(opt.csv_out, std::ios::binary);
        if (!csv) throw ValidationError("cannot write report: " + opt.csv_out);
        csv << "label,auc,pos,neg\n";
        for (const auto& la : report.per_label) {
            if (std::isnan(la.auc))
                std::snprintf(line, sizeof line, "%s,undefined,%zu,%zu\n", la.label.c_str(),
                              la.n_pos, la.n_neg);
            else
                std::snprintf(line, sizeof line, "%s,%.6f,%zu,%zu\n", la.label.c_str(), la.auc,
                              la.n_pos, la.n_neg);
            csv << line;
        }
        csv.close();
        manifest.add_output(opt.csv_out);
    }

    manifest.stats["mean_auc"] = mean;
    write_manifest(opt.out + ".manifest.json", manifest);
}

} // namespace

void register_eval(CLI::App& app) {
    auto opt = std::make_shared<EvalOptions>();
    CLI::App* sub = app.add_subcommand("eval", "per-label AUC report for a predictions file");
    sub->add_option("--pred", opt->pred, "predictions CSV (Id + one column per label)")->required();
    sub->add_option("--data", opt->data, "ground-truth label CSV")->required();
    sub->add_option("--out", opt->out, "report text path")->required();
    sub->add_option("--csv", opt->csv_out, "also write per-label AUCs as CSV");
    sub->add_option("--rad-points", opt->rad_points,
                    "operating points CSV (label,FPR,TPR) to place against each ROC curve");
    sub->add_option("--subset", opt->subset, "labels averaged into the headline mean AUC")
        ->delimiter(',');
    opt->hierarchy.attach(*sub);
    sub->callback([opt] { run_eval(*opt); });
}

} // namespace hmlc::cli
