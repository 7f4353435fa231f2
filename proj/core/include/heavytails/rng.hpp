#pragma once

#include <cstdint>
#include <limits>

namespace heavytails {

/// SplitMix64 (Steele, Lea & Flood 2014): the i-th output is a fixed 64-bit
/// mix of seed + i * 0x9E3779B97F4A7C15, so streams are counter-addressable
/// and reproducible in any language that implements the same mix.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Output at an absolute counter position, independent of the stream state.
    static result_type at(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
    }

    std::uint64_t counter_state() const { return state_; }

private:
    static result_type mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

/// Standard normal deviates by the Marsaglia polar method; the second deviate
/// of each accepted pair is cached.
class GaussianSource {
public:
    explicit GaussianSource(SplitMix64& rng) : rng_(&rng) {}

    double operator()();

private:
    SplitMix64* rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Derive an independent seed for a numbered sub-stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace heavytails
