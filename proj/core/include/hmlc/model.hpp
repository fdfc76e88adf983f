#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hmlc {

enum class Activation { Relu, Identity };

/// Dense layer, weights row-major [out x in].
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
    Activation act = Activation::Identity;

    double& weight(std::size_t o, std::size_t i) { return w[o * in + i]; }
    double weight(std::size_t o, std::size_t i) const { return w[o * in + i]; }
};

struct ModelParams {
    std::vector<Layer> layers;

    // Carried into checkpoints so a model is only ever applied to the
    // hierarchy and policy it was trained with.
    std::string hierarchy_digest;
    std::string policy_name;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return layers.front().in; }
    std::size_t output_dim() const { return layers.back().out; }
    std::size_t parameter_count() const;
};

struct ArchConfig {
    std::vector<std::size_t> hidden = {64, 64};
};

/// Layer weights start uniform in [-1/sqrt(in), 1/sqrt(in)], biases at zero.
/// Hidden layers use ReLU; the output layer emits raw logits.
ModelParams init_model(std::size_t input_dim, std::size_t output_dim, const ArchConfig& arch,
                       std::uint64_t seed);

struct Prediction {
    std::vector<double> logits;
    std::vector<double> cond_probs;   // sigmoid of each logit
};

Prediction forward(const ModelParams& m, std::span<const double> features);

struct TrainExample {
    std::span<const double> features;
    std::span<const double> targets;
    std::span<const std::uint8_t> mask;
};

struct GradBuffer {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;

    static GradBuffer zeros_like(const ModelParams& m);
    void reset();
};

/// Mean over the batch of the masked binary cross-entropy
///   -(1/B) sum_i sum_k mask_ik [ y log p + (1-y) log(1-p) ]
/// with 0 log 0 treated as 0. When grads is non-null the parameter gradients
/// are accumulated into it (after a reset). Throws NumericError if the loss
/// or any gradient is not finite, ValidationError on an empty batch.
double loss_and_gradients(const ModelParams& m, std::span<const TrainExample> batch,
                          GradBuffer* grads);

} // namespace hmlc
