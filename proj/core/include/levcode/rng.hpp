#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace levcode {

/// Seeded 64-bit PRNG (splitmix64 stream). All stochastic pieces of the
/// library draw from explicit instances of this generator so that every
/// experiment is reproducible from its seeds alone. The stdlib engines and
/// distributions are avoided on purpose: their output is implementation
/// defined, which would break byte-identical reruns.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n), unbiased (rejection on the tail).
    std::uint64_t next_below(std::uint64_t n);

    /// Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal via Box-Muller; caches the paired deviate.
    double next_gaussian();

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Deterministic derived seed for an independent substream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Cumulative distribution over nonnegative masses, normalized so the last
/// entry is exactly 1. Throws InvalidDistributionError when all masses are
/// zero or any is negative.
std::vector<double> cumulative_distribution(std::span<const double> masses);

/// Inverse-CDF draw: smallest index with cdf[i] > u. Zero-mass indices are
/// never returned because their cdf step is empty.
std::size_t sample_index(std::span<const double> cdf, double u);

}  // namespace levcode
