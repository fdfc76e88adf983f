#include "cli_common.hpp"

#include "hmlc/checkpoint.hpp"
#include "hmlc/csv.hpp"
#include "hmlc/errors.hpp"

namespace hmlc::cli {

void HierarchyOpt::attach(CLI::App& sub) {
    sub.add_option("--hierarchy", file, "label hierarchy file (default: built-in chest X-ray forest)");
}

LabelHierarchy HierarchyOpt::resolve(RunManifest& manifest) const {
    if (file.empty()) {
        manifest.config["hierarchy"] = "builtin";
        manifest.config["hierarchy_digest"] = LabelHierarchy::chexpert().digest();
        return LabelHierarchy::chexpert();
    }
    LabelHierarchy h = LabelHierarchy::load(file);
    manifest.config["hierarchy"] = file;
    manifest.config["hierarchy_digest"] = h.digest();
    manifest.add_input(file);
    return h;
}

void PolicyOpt::attach(CLI::App& sub) {
    sub.add_option("--policy", name, "u-ignore|u-zeros|u-ones|u-zeros-lsr|u-ones-lsr")
        ->capture_default_str();
    low_opt_ = sub.add_option("--lsr-low", lsr_low, "smoothing interval lower bound override");
    high_opt_ = sub.add_option("--lsr-high", lsr_high, "smoothing interval upper bound override");
    sub.add_flag("--lsr-resample", resample, "redraw smoothing targets every epoch");
    sub.add_option("--missing", missing, "blank-cell rule: as-negative|ignore")
        ->capture_default_str()
        ->check(CLI::IsMember({"as-negative", "ignore"}));
}

LabelPolicy PolicyOpt::resolve() const {
    LabelPolicy p = LabelPolicy::parse(name);
    if (low_opt_ && low_opt_->count() > 0) p.lsr_low = lsr_low;
    if (high_opt_ && high_opt_->count() > 0) p.lsr_high = lsr_high;
    p.lsr_resample = resample;
    p.missing = missing == "ignore" ? MissingRule::Ignore : MissingRule::AsNegative;
    p.validate();
    return p;
}

nlohmann::json PolicyOpt::config_json(const LabelPolicy& p) const {
    nlohmann::json j;
    j["policy"] = p.name();
    j["lsr_low"] = p.lsr_low;
    j["lsr_high"] = p.lsr_high;
    j["lsr_resample"] = p.lsr_resample;
    j["missing"] = p.missing == MissingRule::Ignore ? "ignore" : "as-negative";
    return j;
}

void TrainOpt::attach(CLI::App& sub) {
    sub.add_option("--lr", lr0, "initial learning rate")->capture_default_str();
    sub.add_option("--lr-decay", lr_decay, "per-epoch learning-rate factor")->capture_default_str();
    sub.add_option("--batch", batch, "minibatch size")->capture_default_str();
    sub.add_option("--epochs-p1", epochs_p1, "phase-1 epochs")->capture_default_str();
    sub.add_option("--epochs-p2", epochs_p2, "phase-2 epochs")->capture_default_str();
    sub.add_option("--hidden", hidden, "hidden layer widths")
        ->delimiter(',')
        ->capture_default_str();
}

TrainConfig TrainOpt::config(std::uint64_t seed) const {
    TrainConfig cfg;
    cfg.lr0 = lr0;
    cfg.lr_decay = lr_decay;
    cfg.batch_size = batch;
    cfg.epochs_phase1 = epochs_p1;
    cfg.epochs_phase2 = epochs_p2;
    cfg.seed = seed;
    return cfg;
}

ArchConfig TrainOpt::arch() const { return ArchConfig{hidden}; }

nlohmann::json TrainOpt::config_json() const {
    nlohmann::json j;
    j["lr"] = lr0;
    j["lr_decay"] = lr_decay;
    j["batch"] = batch;
    j["epochs_p1"] = epochs_p1;
    j["epochs_p2"] = epochs_p2;
    j["hidden"] = hidden;
    return j;
}

void SynthOpt::attach(CLI::App& sub) {
    sub.add_option("--n", n, "training rows to sample")->capture_default_str();
    sub.add_option("--eval-n", eval_n, "clean held-out rows to sample")->capture_default_str();
    sub.add_option("--d", d, "feature dimension")->capture_default_str();
    sub.add_option("--rho", rho, "fraction of cells replaced by -1")->capture_default_str();
    sub.add_option("--beta", beta, "P(true positive | cell replaced)")->capture_default_str();
    sub.add_option("--weight-scale", weight_scale, "ground-truth weight magnitude")
        ->capture_default_str();
    sub.add_option("--parent-mix", parent_mix, "child/parent weight correlation in [0,1)")
        ->capture_default_str();
}

SyntheticConfig SynthOpt::config(std::uint64_t seed) const {
    SyntheticConfig cfg;
    cfg.feature_dim = d;
    cfg.n = n;
    cfg.uncertain_rate = rho;
    cfg.uncertain_positive_bias = beta;
    cfg.weight_scale = weight_scale;
    cfg.parent_weight_mix = parent_mix;
    cfg.seed = seed;
    return cfg;
}

nlohmann::json SynthOpt::config_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["eval_n"] = eval_n;
    j["d"] = d;
    j["rho"] = rho;
    j["beta"] = beta;
    j["weight_scale"] = weight_scale;
    j["parent_mix"] = parent_mix;
    return j;
}

Dataset features_only_dataset(const std::filesystem::path& file, const LabelHierarchy& h) {
    const CsvTable table = read_csv(file);
    if (table.header.empty() || table.header[0] != "Id")
        throw ValidationError("feature file must start with an Id column: " + file.string());
    const std::size_t dim = table.header.size() - 1;
    if (dim == 0) throw ValidationError("feature file has no feature columns: " + file.string());

    Dataset ds;
    ds.schema = h.labels();
    ds.id_column = "Id";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Sample s;
        s.id = table.rows[r][0];
        s.raw_labels.assign(h.size(), RawLabel::Missing);
        s.features.reserve(dim);
        for (std::size_t c = 1; c < table.header.size(); ++c) {
            try {
                s.features.push_back(std::stod(table.rows[r][c]));
            } catch (const std::exception&) {
                throw ValidationError("bad feature value in row " + std::to_string(r + 2) +
                                      ", column '" + table.header[c] + "': " + table.rows[r][c]);
            }
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

ModelParams load_checked_model(const std::filesystem::path& file, const LabelHierarchy& h) {
    ModelParams m = load_checkpoint(file);
    if (m.hierarchy_digest != h.digest())
        throw ValidationError("checkpoint " + file.string() + " was trained against hierarchy " +
                              m.hierarchy_digest + " but the active hierarchy is " + h.digest());
    return m;
}

std::vector<std::string> trimmed(std::vector<std::string> values) {
    for (auto& v : values) v = trim(v);
    return values;
}

} // namespace hmlc::cli
