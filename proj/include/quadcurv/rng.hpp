#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace quadcurv {

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard, and all value derivation below uses raw bits only, so a fixed
/// seed yields the same stream on every conforming platform. The standard
/// distributions are implementation-defined and deliberately not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

/// Stateless per-index seed derivation (splitmix64 finalizer), so streams
/// for sample i can be reproduced without generating samples 0..i-1.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace quadcurv
