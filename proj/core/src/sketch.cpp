#include "levcode/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levcode {

namespace {

void check_consistent(const PartitionPlan& plan, const SketchPlan& sp) {
    if (sp.k == 0 || sp.draws.size() != sp.k)
        throw ConsistencyError("sketch plan: draw list inconsistent with k");
    if (sp.r != sp.k * plan.part_size)
        throw ConsistencyError("sketch plan: row budget r != k * part_size");
    if (sp.distinct_parts.size() != sp.weights.size() ||
        sp.distinct_parts.size() != sp.rescale.size())
        throw ConsistencyError("sketch plan: distinct/weights/rescale sizes differ");
    std::size_t wsum = 0;
    for (std::size_t j = 0; j < sp.distinct_parts.size(); ++j) {
        if (sp.distinct_parts[j] >= plan.K)
            throw ConsistencyError("sketch plan: part index out of range");
        if (sp.weights[j] == 0) throw ConsistencyError("sketch plan: zero weight");
        if (!(sp.rescale[j] > 0.0) || !std::isfinite(sp.rescale[j]))
            throw ConsistencyError("sketch plan: bad rescale factor");
        wsum += sp.weights[j];
    }
    if (wsum != sp.k) throw ConsistencyError("sketch plan: weights do not sum to k");
}

}  // namespace

SketchPlan sample_weighted(const PartitionPlan& plan, std::size_t k, SplitMix64& rng) {
    if (k == 0) throw InvalidInputError("sample_weighted: k must be >= 1");
    const std::vector<double> cdf = cumulative_distribution(plan.Pi);

    SketchPlan sp;
    sp.k = k;
    sp.r = k * plan.part_size;
    sp.draws.reserve(k);
    std::vector<std::size_t> slot(plan.K, SIZE_MAX);
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t part = sample_index(cdf, rng.next_double());
        sp.draws.push_back(part);
        if (slot[part] == SIZE_MAX) {
            slot[part] = sp.distinct_parts.size();
            sp.distinct_parts.push_back(part);
            sp.weights.push_back(1);
        } else {
            ++sp.weights[slot[part]];
        }
    }
    sp.rescale.reserve(sp.distinct_parts.size());
    for (std::size_t part : sp.distinct_parts)
        sp.rescale.push_back(1.0 / std::sqrt(static_cast<double>(sp.r) * plan.Pi[part]));
    return sp;
}

SketchPlan sample_weighted(const PartitionPlan& plan, std::size_t k, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return sample_weighted(plan, k, rng);
}

SketchPlan identity_sketch(const PartitionPlan& plan) {
    SketchPlan sp;
    sp.k = plan.K;
    sp.r = plan.K * plan.part_size;
    sp.draws.resize(plan.K);
    sp.distinct_parts.resize(plan.K);
    for (std::size_t i = 0; i < plan.K; ++i) sp.draws[i] = sp.distinct_parts[i] = i;
    sp.weights.assign(plan.K, 1);
    sp.rescale.assign(plan.K, 1.0);
    return sp;
}

Mat build_Sp(const PartitionPlan& plan, const SketchPlan& sp) {
    check_consistent(plan, sp);
    const std::size_t m = plan.part_size;
    Mat S(sp.distinct_parts.size() * m, plan.N);
    for (std::size_t j = 0; j < sp.distinct_parts.size(); ++j) {
        const std::size_t base = sp.distinct_parts[j] * m;
        for (std::size_t t = 0; t < m; ++t) S(j * m + t, base + t) = sp.rescale[j];
    }
    return S;
}

Mat build_Shat(const PartitionPlan& plan, const SketchPlan& sp) {
    check_consistent(plan, sp);
    const std::size_t m = plan.part_size;
    Mat S(sp.distinct_parts.size() * m, plan.N);
    for (std::size_t j = 0; j < sp.distinct_parts.size(); ++j) {
        const double scale = std::sqrt(static_cast<double>(sp.weights[j])) * sp.rescale[j];
        const std::size_t base = sp.distinct_parts[j] * m;
        for (std::size_t t = 0; t < m; ++t) S(j * m + t, base + t) = scale;
    }
    return S;
}

Mat build_classic_sketch(std::span<const double> pi, std::size_t r, SplitMix64& rng) {
    if (r == 0) throw InvalidInputError("build_classic_sketch: r must be >= 1");
    double total = 0.0;
    for (double v : pi) total += v;
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidDistributionError("build_classic_sketch: pi sums to " + std::to_string(total));
    const std::vector<double> cdf = cumulative_distribution(pi);

    Mat S(r, pi.size());
    for (std::size_t t = 0; t < r; ++t) {
        const std::size_t i = sample_index(cdf, rng.next_double());
        S(t, i) = 1.0 / std::sqrt(static_cast<double>(r) * pi[i]);
    }
    return S;
}

Mat build_classic_sketch(std::span<const double> pi, std::size_t r, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return build_classic_sketch(pi, r, rng);
}

}  // namespace levcode
