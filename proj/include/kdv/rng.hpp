#pragma once

#include <cstdint>
#include <numbers>

namespace kdv {

/// SplitMix64: tiny, seedable, identical output on every platform. Used
/// wherever reproducible random data is part of an experiment definition.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, 2*pi).
    double angle() { return 2.0 * std::numbers::pi * uniform01(); }

    /// Standard normal via Box-Muller (used only by test utilities and
    /// perturbation helpers, not by any experiment definition).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace kdv
