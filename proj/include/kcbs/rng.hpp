#pragma once

#include <cstdint>
#include <limits>

namespace kcbs {

/// Counter-based generator: the i-th draw of stream (seed, s) is
/// mix(key + i * golden) with key = mix(seed ^ mix(s + golden)), where mix is
/// the SplitMix64 finalizer. Streams are addressed, not advanced, so results
/// do not depend on how work is scheduled across streams.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + kGolden))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Independent child stream, derived from this generator's key only.
    CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream); }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace kcbs
