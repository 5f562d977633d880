#include "levcode/rng.hpp"

#include <cmath>
#include <numbers>

#include "levcode/errors.hpp"

namespace levcode {

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
    if (n == 0) throw InvalidInputError("next_below: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::int64_t SplitMix64::next_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw InvalidInputError("next_int: lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<std::int64_t>(next_below(span));
}

double SplitMix64::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t SplitMix64::derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mixer(seed ^ (0xA5A5A5A55A5A5A5AULL + stream * 0x9E3779B97F4A7C15ULL));
    return mixer.next_u64();
}

std::vector<double> cumulative_distribution(std::span<const double> masses) {
    if (masses.empty()) throw InvalidDistributionError("empty distribution");
    double total = 0.0;
    for (double m : masses) {
        if (m < 0.0) throw InvalidDistributionError("negative mass in distribution");
        total += m;
    }
    if (total <= 0.0) throw InvalidDistributionError("all masses are zero");
    std::vector<double> cdf(masses.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        acc += masses[i];
        cdf[i] = acc / total;
    }
    cdf.back() = 1.0;
    return cdf;
}

std::size_t sample_index(std::span<const double> cdf, double u) {
    std::size_t lo = 0, hi = cdf.size() - 1;
    // first index with cdf[i] > u; u < 1 == cdf.back() so hi is valid
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cdf[mid] > u)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace levcode
