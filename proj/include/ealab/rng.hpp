#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace ealab {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stateless keyed hash: the same (key, counter) always gives the same word.
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(mix64(key) ^ mix64(counter ^ 0x632be59bd9b4e019ULL));
}

/// Derives an independent 64-bit seed from a parent seed and a list of labels.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) noexcept {
    std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
    for (auto l : labels) h = counter_hash(h, l);
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a word.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
constexpr double to_unit_open_low(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Box-Muller transform on two words. Fixed formula so golden files never drift.
inline double normal_from_bits(std::uint64_t a, std::uint64_t b) noexcept {
    const double r = std::sqrt(-2.0 * std::log(to_unit_open_low(a)));
    return r * std::cos(2.0 * std::numbers::pi * to_unit(b));
}

/// Sequential generator for Markov chains and clocks.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here rather than through
/// <random> so every platform draws identical values.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return to_unit(engine_()); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double exponential(double rate) { return -std::log(to_unit_open_low(engine_())) / rate; }

    double normal() {
        const auto a = engine_();
        const auto b = engine_();
        return normal_from_bits(a, b);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ealab
