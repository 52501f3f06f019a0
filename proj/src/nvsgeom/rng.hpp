#pragma once

#include <cstdint>

namespace nvs {

/// Counter-based pseudo-random generator (SplitMix64).
///
/// The n-th output is a fixed 64-bit mix of `seed + n * 0x9E3779B97F4A7C15`,
/// so a (seed, counter) pair fully determines every draw on every platform.
/// All distributions below are hand-rolled on top of the raw stream for the
/// same reason: standard-library distributions are not bit-portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). Rejection sampling, exactly unbiased.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Standard normal via Box-Muller (two raw draws per variate).
    double normal();

    /// Independent child seed for stream `index` of the stream seeded with
    /// `seed`. Used to make parallel work items order- and thread-invariant.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t state_;
};

}  // namespace nvs
