#include "hmlc/train.hpp"

#include <cmath>

#include "hmlc/errors.hpp"
#include "hmlc/rng.hpp"

namespace hmlc {
namespace {

struct AdamState {
    std::vector<std::vector<double>> mw, vw, mb, vb;
    std::uint64_t t = 0;

    static AdamState zeros_like(const ModelParams& m) {
        AdamState s;
        const std::size_t n = m.layers.size();
        s.mw.resize(n); s.vw.resize(n); s.mb.resize(n); s.vb.resize(n);
        for (std::size_t l = 0; l < n; ++l) {
            s.mw[l].assign(m.layers[l].w.size(), 0.0);
            s.vw[l].assign(m.layers[l].w.size(), 0.0);
            s.mb[l].assign(m.layers[l].b.size(), 0.0);
            s.vb[l].assign(m.layers[l].b.size(), 0.0);
        }
        return s;
    }
};

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& mom, std::vector<double>& vel,
                 const TrainConfig& cfg, double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        mom[i] = cfg.beta1 * mom[i] + (1.0 - cfg.beta1) * g;
        vel[i] = cfg.beta2 * vel[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = mom[i] / bc1;
        const double vhat = vel[i] / bc2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

/// Updates layers [first_layer, end); earlier layers are left untouched so
/// their bytes stay identical.
void adam_step(ModelParams& m, const GradBuffer& g, AdamState& st, const TrainConfig& cfg,
               double lr, std::size_t first_layer) {
    ++st.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    for (std::size_t l = first_layer; l < m.layers.size(); ++l) {
        adam_update(m.layers[l].w, g.w[l], st.mw[l], st.vw[l], cfg, lr, bc1, bc2);
        adam_update(m.layers[l].b, g.b[l], st.mb[l], st.vb[l], cfg, lr, bc1, bc2);
    }
}

double run_epoch(ModelParams& m, const Dataset& ds, const TargetMatrix& tm,
                 const std::vector<std::uint8_t>& mask, const std::vector<std::size_t>& row_set,
                 const TrainConfig& cfg, double lr, AdamState& adam, std::size_t first_layer,
                 Rng& shuffle_rng, GradBuffer& grads) {
    std::vector<std::size_t> rows = row_set;
    shuffle_rng.shuffle(rows);

    const std::size_t L = tm.cols;
    std::vector<TrainExample> batch;
    double loss_sum = 0.0;
    std::size_t n_batches = 0;

    for (std::size_t start = 0; start < rows.size(); start += cfg.batch_size) {
        const std::size_t end = std::min(start + cfg.batch_size, rows.size());
        batch.clear();
        for (std::size_t i = start; i < end; ++i) {
            const std::size_t r = rows[i];
            batch.push_back({ds.samples[r].features,
                             tm.row_targets(r),
                             {mask.data() + r * L, L}});
        }
        const double loss = loss_and_gradients(m, batch, &grads);
        adam_step(m, grads, adam, cfg, lr, first_layer);
        loss_sum += loss;
        ++n_batches;
    }
    return loss_sum / static_cast<double>(n_batches);
}

void check_trainable(const Dataset& ds, const LabelHierarchy& h, const TrainConfig& cfg) {
    if (ds.size() == 0) throw ValidationError("cannot train on an empty dataset");
    if (cfg.batch_size == 0) throw ValidationError("batch_size must be positive");
    if (ds.label_count() != h.size()) {
        throw ValidationError("dataset schema does not match the hierarchy");
    }
    const std::size_t d = ds.feature_dim();
    if (d == 0) throw ValidationError("training requires feature vectors on every sample");
    for (const auto& s : ds.samples) {
        if (s.features.size() != d) {
            throw ValidationError("sample '" + s.id + "' has inconsistent feature dimension");
        }
    }
}

std::vector<std::uint8_t> scoped_mask(const TargetMatrix& tm, const std::vector<bool>& in_scope) {
    std::vector<std::uint8_t> mask(tm.mask);
    const std::size_t L = tm.cols;
    for (std::size_t i = 0; i < tm.rows; ++i) {
        for (std::size_t k = 0; k < L; ++k) {
            if (!in_scope[k]) mask[i * L + k] = 0;
        }
    }
    return mask;
}

ModelParams fresh_model(const Dataset& ds, const LabelHierarchy& h, const LabelPolicy& policy,
                        const TrainConfig& cfg, const ArchConfig& arch) {
    ModelParams m = init_model(ds.feature_dim(), h.size(), arch, derive_seed(cfg.seed, "init"));
    m.hierarchy_digest = h.digest();
    m.policy_name = policy.name();
    m.seed = cfg.seed;
    return m;
}

} // namespace

TrainResult train_two_phase(const Dataset& ds, const LabelHierarchy& h, const LabelPolicy& policy,
                            const TrainConfig& cfg, const ArchConfig& arch) {
    check_trainable(ds, h, cfg);

    TrainResult res;
    res.model = fresh_model(ds, h, policy, cfg, arch);

    const std::uint64_t map_seed = derive_seed(cfg.seed, "policy-map");
    TargetMatrix base = apply_policy(ds, policy, map_seed);

    const std::vector<std::size_t> cond = conditional_indices(base, h);
    if (cond.empty()) {
        throw ValidationError("conditional subset is empty: no sample maps every parent label (" +
                              [&] {
                                  std::string names;
                                  for (std::size_t k : h.parent_labels()) {
                                      if (!names.empty()) names += ", ";
                                      names += h.label(k);
                                  }
                                  return names;
                              }() +
                              ") positive under policy " + policy.name());
    }
    res.log.phase1_samples = cond.size();
    for (std::size_t r : cond) {
        if (!all_parents_positive(base, r, h)) ++res.log.phase1_negative_parent;
    }

    std::vector<bool> in_scope(h.size(), false);
    for (std::size_t k : phase1_scope(h)) in_scope[k] = true;

    std::vector<std::size_t> all_rows(ds.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

    GradBuffer grads = GradBuffer::zeros_like(res.model);
    const bool resample = policy.lsr_resample && policy.uses_lsr();

    AdamState adam1 = AdamState::zeros_like(res.model);
    for (std::size_t e = 0; e < cfg.epochs_phase1; ++e) {
        const TargetMatrix fresh =
            (resample && e > 0) ? apply_policy(ds, policy, derive_seed(cfg.seed, "policy-map", e))
                                : TargetMatrix{};
        const TargetMatrix& tm = (resample && e > 0) ? fresh : base;
        const std::vector<std::uint8_t> mask = scoped_mask(tm, in_scope);
        const double lr = cfg.lr0 * std::pow(cfg.lr_decay, static_cast<double>(e));
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", e));
        const double loss =
            run_epoch(res.model, ds, tm, mask, cond, cfg, lr, adam1, 0, shuffle_rng, grads);
        res.log.epochs.push_back({1, e, lr, loss});
    }

    AdamState adam2 = AdamState::zeros_like(res.model);
    const std::size_t last = res.model.layers.size() - 1;
    for (std::size_t e = 0; e < cfg.epochs_phase2; ++e) {
        const std::size_t global = cfg.epochs_phase1 + e;
        const TargetMatrix fresh =
            resample ? apply_policy(ds, policy, derive_seed(cfg.seed, "policy-map", global))
                     : TargetMatrix{};
        const TargetMatrix& tm = resample ? fresh : base;
        const double lr = cfg.lr0 * std::pow(cfg.lr_decay, static_cast<double>(e));
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", global));
        const double loss =
            run_epoch(res.model, ds, tm, tm.mask, all_rows, cfg, lr, adam2, last, shuffle_rng, grads);
        res.log.epochs.push_back({2, e, lr, loss});
    }
    return res;
}

TrainResult train_flat(const Dataset& ds, const LabelHierarchy& h, const LabelPolicy& policy,
                       const TrainConfig& cfg, const ArchConfig& arch) {
    check_trainable(ds, h, cfg);

    TrainResult res;
    res.model = fresh_model(ds, h, policy, cfg, arch);
    res.log.phase1_samples = ds.size();

    const std::uint64_t map_seed = derive_seed(cfg.seed, "policy-map");
    TargetMatrix base = apply_policy(ds, policy, map_seed);

    std::vector<std::size_t> all_rows(ds.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

    GradBuffer grads = GradBuffer::zeros_like(res.model);
    const bool resample = policy.lsr_resample && policy.uses_lsr();

    AdamState adam = AdamState::zeros_like(res.model);
    const std::size_t epochs = cfg.epochs_phase1 + cfg.epochs_phase2;
    for (std::size_t e = 0; e < epochs; ++e) {
        const TargetMatrix fresh =
            (resample && e > 0) ? apply_policy(ds, policy, derive_seed(cfg.seed, "policy-map", e))
                                : TargetMatrix{};
        const TargetMatrix& tm = (resample && e > 0) ? fresh : base;
        const double lr = cfg.lr0 * std::pow(cfg.lr_decay, static_cast<double>(e));
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", e));
        const double loss =
            run_epoch(res.model, ds, tm, tm.mask, all_rows, cfg, lr, adam, 0, shuffle_rng, grads);
        res.log.epochs.push_back({0, e, lr, loss});
    }
    return res;
}

} // namespace hmlc
