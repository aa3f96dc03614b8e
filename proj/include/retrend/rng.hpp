#pragma once

#include <cmath>
#include <cstdint>

namespace retrend {

/**
 * Counter-based deterministic generator: splitmix64 finalizer applied to
 * seed + counter * golden gamma (algorithm "splitmix64", version 1).
 *
 * Output for a given (seed, counter) is a pure function of integer math,
 * so fixtures generated from it replay identically run to run and are
 * independent of platform RNG libraries. Gaussian draws consume two
 * uniforms each via Box-Muller.
 */
class CounterRng {
public:
    static constexpr const char* kAlgorithm = "splitmix64";
    static constexpr int kVersion = 1;

    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    /// Stateless word function: the i-th word of the stream for this seed.
    static std::uint64_t word(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return word(seed_, counter_++); }

    /// Uniform double in the open interval (0, 1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    std::uint64_t seed_;
    std::uint64_t counter_;
};

/// Derives an independent stream seed from a parent seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return CounterRng::word(seed ^ 0xA5A5A5A55A5A5A5AULL, stream);
}

}  // namespace retrend
