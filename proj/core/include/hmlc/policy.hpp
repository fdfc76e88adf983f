#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hmlc/rng.hpp"

namespace hmlc {

/// Raw label symbol from a label CSV cell.
enum class RawLabel : std::int8_t {
    Negative = 0,   // "0.0"
    Positive = 1,   // "1.0"
    Uncertain = 2,  // "-1.0"
    Missing = 3,    // empty cell ("not mentioned")
};

enum class PolicyKind {
    UIgnore,    // mask out uncertain entries
    UZeros,     // uncertain -> 0
    UOnes,      // uncertain -> 1
    UZerosLsr,  // uncertain -> u ~ U(lsr_low, lsr_high), near 0
    UOnesLsr,   // uncertain -> u ~ U(lsr_low, lsr_high), near 1
};

enum class MissingRule {
    AsNegative,  // blank cells train as negative (default)
    Ignore,      // blank cells masked out of the loss
};

/// Uncertainty-handling rule mapping raw labels to training targets.
/// The smoothing intervals default to [0, 0.3] for u-zeros-lsr and
/// [0.55, 0.85] for u-ones-lsr and are exposed as parameters.
struct LabelPolicy {
    PolicyKind kind = PolicyKind::UOnes;
    double lsr_low = 0.0;
    double lsr_high = 0.0;
    MissingRule missing = MissingRule::AsNegative;
    /// Redraw smoothing targets before every training epoch instead of
    /// fixing them once at dataset load.
    bool lsr_resample = false;

    static LabelPolicy make(PolicyKind kind);

    /// Accepts "u-ignore", "u-zeros", "u-ones", "u-zeros-lsr", "u-ones-lsr".
    static LabelPolicy parse(std::string_view name);

    std::string name() const;
    bool uses_lsr() const { return kind == PolicyKind::UZerosLsr || kind == PolicyKind::UOnesLsr; }

    /// Throws ValidationError unless 0 <= lsr_low <= lsr_high <= 1.
    void validate() const;
};

/// Per-sample training targets plus loss-inclusion mask.
struct MappedTargets {
    std::vector<double> targets;       // in [0,1]
    std::vector<std::uint8_t> mask;    // 1 = include in the loss
};

/// Applies the policy to one raw label vector. Certain labels (0/1) always
/// pass through with mask 1; smoothing draws one independent uniform per
/// uncertain entry from rng. Masked-out entries carry a 0.5 sentinel target.
MappedTargets map_labels(std::span<const RawLabel> raw, const LabelPolicy& policy, Rng& rng);

} // namespace hmlc
