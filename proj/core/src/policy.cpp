#include "hmlc/policy.hpp"

#include "hmlc/errors.hpp"

namespace hmlc {

LabelPolicy LabelPolicy::make(PolicyKind kind) {
    LabelPolicy p;
    p.kind = kind;
    switch (kind) {
        case PolicyKind::UZerosLsr:
            p.lsr_low = 0.0;
            p.lsr_high = 0.3;
            break;
        case PolicyKind::UOnesLsr:
            p.lsr_low = 0.55;
            p.lsr_high = 0.85;
            break;
        default:
            break;
    }
    return p;
}

LabelPolicy LabelPolicy::parse(std::string_view name) {
    if (name == "u-ignore") return make(PolicyKind::UIgnore);
    if (name == "u-zeros") return make(PolicyKind::UZeros);
    if (name == "u-ones") return make(PolicyKind::UOnes);
    if (name == "u-zeros-lsr") return make(PolicyKind::UZerosLsr);
    if (name == "u-ones-lsr") return make(PolicyKind::UOnesLsr);
    throw ValidationError("unknown policy '" + std::string(name) +
                          "' (expected u-ignore|u-zeros|u-ones|u-zeros-lsr|u-ones-lsr)");
}

std::string LabelPolicy::name() const {
    switch (kind) {
        case PolicyKind::UIgnore: return "u-ignore";
        case PolicyKind::UZeros: return "u-zeros";
        case PolicyKind::UOnes: return "u-ones";
        case PolicyKind::UZerosLsr: return "u-zeros-lsr";
        case PolicyKind::UOnesLsr: return "u-ones-lsr";
    }
    return "?";
}

void LabelPolicy::validate() const {
    if (!(lsr_low >= 0.0 && lsr_low <= 1.0 && lsr_high >= 0.0 && lsr_high <= 1.0)) {
        throw ValidationError("policy: smoothing interval must lie within [0, 1]");
    }
    if (lsr_low > lsr_high) {
        throw ValidationError("policy: lsr_low must not exceed lsr_high");
    }
}

MappedTargets map_labels(std::span<const RawLabel> raw, const LabelPolicy& policy, Rng& rng) {
    policy.validate();
    MappedTargets out;
    out.targets.resize(raw.size());
    out.mask.assign(raw.size(), 1);

    for (std::size_t k = 0; k < raw.size(); ++k) {
        switch (raw[k]) {
            case RawLabel::Negative:
                out.targets[k] = 0.0;
                break;
            case RawLabel::Positive:
                out.targets[k] = 1.0;
                break;
            case RawLabel::Uncertain:
                switch (policy.kind) {
                    case PolicyKind::UIgnore:
                        out.targets[k] = 0.5;  // sentinel, never enters the loss
                        out.mask[k] = 0;
                        break;
                    case PolicyKind::UZeros:
                        out.targets[k] = 0.0;
                        break;
                    case PolicyKind::UOnes:
                        out.targets[k] = 1.0;
                        break;
                    case PolicyKind::UZerosLsr:
                    case PolicyKind::UOnesLsr:
                        out.targets[k] = rng.uniform(policy.lsr_low, policy.lsr_high);
                        break;
                }
                break;
            case RawLabel::Missing:
                if (policy.missing == MissingRule::AsNegative) {
                    out.targets[k] = 0.0;
                } else {
                    out.targets[k] = 0.5;  // sentinel, never enters the loss
                    out.mask[k] = 0;
                }
                break;
            default:
                throw ValidationError("map_labels: invalid raw label symbol at index " +
                                      std::to_string(k));
        }
    }
    return out;
}

} // namespace hmlc
