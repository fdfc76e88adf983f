#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hmlc {

/// Deterministic random stream (xoshiro256** seeded through splitmix64).
/// Every draw is defined here, not by the standard library, so sequences are
/// identical across compilers and platforms. All toolkit randomness flows
/// from one root seed through derive_seed() streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// [0, 1), 53-bit resolution.
    double next_double();

    /// [lo, hi).
    double uniform(double lo, double hi);

    /// [0, n). Multiply-high mapping; n must be > 0.
    std::uint64_t bounded(std::uint64_t n);

    /// Standard normal via Marsaglia polar, second value cached.
    double normal();

    /// Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::array<std::uint64_t, 4> state_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for a named component stream, e.g. derive_seed(seed, "policy").
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

/// Per-item seed within a stream, e.g. one per sample.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

} // namespace hmlc
