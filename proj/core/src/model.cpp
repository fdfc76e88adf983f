#include "hmlc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "hmlc/errors.hpp"
#include "hmlc/rng.hpp"

namespace hmlc {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void affine(const Layer& layer, std::span<const double> x, std::vector<double>& out) {
    out.resize(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
        double acc = layer.b[o];
        const double* w = layer.w.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * x[i];
        out[o] = acc;
    }
}

void apply_activation(Activation act, std::vector<double>& v) {
    if (act == Activation::Relu) {
        for (double& x : v) x = x > 0.0 ? x : 0.0;
    }
}

} // namespace

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

ModelParams init_model(std::size_t input_dim, std::size_t output_dim, const ArchConfig& arch,
                       std::uint64_t seed) {
    if (input_dim == 0 || output_dim == 0) {
        throw ValidationError("model dimensions must be positive");
    }

    ModelParams m;
    m.seed = seed;
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    for (std::size_t h : arch.hidden) {
        if (h == 0) throw ValidationError("hidden layer width must be positive");
        dims.push_back(h);
    }
    dims.push_back(output_dim);

    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        layer.act = (l + 2 < dims.size()) ? Activation::Relu : Activation::Identity;
        layer.w.resize(layer.in * layer.out);
        layer.b.assign(layer.out, 0.0);

        Rng rng(derive_seed(seed, "layer", l));
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (double& w : layer.w) w = rng.uniform(-bound, bound);
        m.layers.push_back(std::move(layer));
    }
    return m;
}

Prediction forward(const ModelParams& m, std::span<const double> features) {
    if (features.size() != m.input_dim()) {
        throw ValidationError("feature vector has dimension " + std::to_string(features.size()) +
                              ", model expects " + std::to_string(m.input_dim()));
    }

    std::vector<double> cur(features.begin(), features.end());
    std::vector<double> next;
    for (const auto& layer : m.layers) {
        affine(layer, cur, next);
        apply_activation(layer.act, next);
        cur.swap(next);
    }

    Prediction p;
    p.logits = std::move(cur);
    p.cond_probs.resize(p.logits.size());
    for (std::size_t k = 0; k < p.logits.size(); ++k) p.cond_probs[k] = sigmoid(p.logits[k]);
    return p;
}

GradBuffer GradBuffer::zeros_like(const ModelParams& m) {
    GradBuffer g;
    g.w.resize(m.layers.size());
    g.b.resize(m.layers.size());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        g.w[l].assign(m.layers[l].w.size(), 0.0);
        g.b[l].assign(m.layers[l].b.size(), 0.0);
    }
    return g;
}

void GradBuffer::reset() {
    for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
}

double loss_and_gradients(const ModelParams& m, std::span<const TrainExample> batch,
                          GradBuffer* grads) {
    if (batch.empty()) throw ValidationError("loss requires a non-empty batch");
    const std::size_t L = m.output_dim();
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    if (grads) grads->reset();

    const std::size_t n_layers = m.layers.size();
    std::vector<std::vector<double>> acts(n_layers + 1);   // post-activation per layer
    std::vector<std::vector<double>> pre(n_layers);        // pre-activation per layer
    std::vector<double> delta;
    std::vector<double> delta_prev;

    double loss = 0.0;
    for (const TrainExample& ex : batch) {
        if (ex.targets.size() != L || ex.mask.size() != L) {
            throw ValidationError("example target/mask length does not match model output");
        }

        acts[0].assign(ex.features.begin(), ex.features.end());
        for (std::size_t l = 0; l < n_layers; ++l) {
            affine(m.layers[l], acts[l], pre[l]);
            acts[l + 1] = pre[l];
            apply_activation(m.layers[l].act, acts[l + 1]);
        }

        delta.assign(L, 0.0);
        for (std::size_t k = 0; k < L; ++k) {
            if (!ex.mask[k]) continue;
            const double y = ex.targets[k];
            const double p = sigmoid(acts[n_layers][k]);
            double term = 0.0;
            if (y != 0.0) term += y * std::log(p);
            if (y != 1.0) term += (1.0 - y) * std::log(1.0 - p);
            loss -= inv_b * term;
            delta[k] = (p - y) * inv_b;
        }

        if (!grads) continue;

        for (std::size_t l = n_layers; l-- > 0;) {
            const Layer& layer = m.layers[l];
            if (layer.act == Activation::Relu) {
                for (std::size_t o = 0; o < layer.out; ++o) {
                    if (pre[l][o] <= 0.0) delta[o] = 0.0;
                }
            }
            auto& gw = grads->w[l];
            auto& gb = grads->b[l];
            const auto& x = acts[l];
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                gb[o] += d;
                double* gw_row = gw.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) gw_row[i] += d * x[i];
            }
            if (l == 0) break;
            delta_prev.assign(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* w = layer.w.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) delta_prev[i] += d * w[i];
            }
            delta.swap(delta_prev);
        }
    }

    if (!std::isfinite(loss)) throw NumericError("training loss is not finite");
    if (grads) {
        for (const auto& v : grads->w) {
            for (double g : v) {
                if (!std::isfinite(g)) throw NumericError("weight gradient is not finite");
            }
        }
        for (const auto& v : grads->b) {
            for (double g : v) {
                if (!std::isfinite(g)) throw NumericError("bias gradient is not finite");
            }
        }
    }
    return loss;
}

} // namespace hmlc
