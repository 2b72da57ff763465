#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace liquidrank {

/// Deterministic random source. All draws go through hand-rolled transforms on
/// top of mt19937_64, whose output sequence is fixed by the standard, so a
/// seed reproduces the same stream on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1).
    double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0,n). n must be positive.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    /// Box-Muller, cosine branch; consumes two engine draws per variate.
    double normal(double mean, double sd) {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * radius * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace liquidrank
