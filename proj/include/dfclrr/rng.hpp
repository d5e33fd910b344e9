#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dfclrr {

/// SplitMix64 step; used both as a standalone mixer and to derive
/// independent stream seeds from (master, indices...) tuples.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stable seed derivation: feeds each index through SplitMix64.
/// Documented so that reports can be reproduced from the command line.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> indices) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t ix : indices) {
        s = h ^ (ix + 0x9E3779B97F4A7C15ull);
        h = splitmix64(s);
    }
    return h;
}

/// Seedable portable generator: std::mt19937_64 (bit-exact by the standard)
/// with explicit bit-to-double mappings, so streams are reproducible across
/// platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1): 53 random mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Fisher-Yates permutation of {0,...,n-1}.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace dfclrr
