#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace cryptsim {

/// Seedable stream built on std::mt19937_64, whose output sequence is fixed
/// by the C++ standard. Uniform and exponential variates are derived here
/// rather than through <random> distributions, whose algorithms are
/// implementation-defined, so a seed reproduces the same draws everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Uniform integer in [0, n), n > 0.
    std::size_t below(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

} // namespace cryptsim
