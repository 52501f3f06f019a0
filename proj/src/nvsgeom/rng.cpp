#include "nvsgeom/rng.hpp"

#include "nvsgeom/common.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nvs {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) fail(Status::invalid_argument, "uniform_below: n must be positive");
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
    std::uint64_t x = next_u64();
    while (rem != 0 && x > std::numeric_limits<std::uint64_t>::max() - rem) {
        x = next_u64();
    }
    return x % n;
}

double Rng::normal() {
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64((index + 1) * kGamma));
}

}  // namespace nvs
