#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "levcode/matrix.hpp"
#include "levcode/partition.hpp"
#include "levcode/rng.hpp"

namespace levcode {

/// One weighted sampling draw over the parts of a PartitionPlan:
/// k parts sampled with replacement by the block scores, deduplicated into
/// distinct parts with integer multiplicities (the weight vector), plus the
/// per-part rescale factor 1 / sqrt(r * Pi_i) with r = k * part_size the
/// retained row budget counted with multiplicity. The budget deliberately
/// uses k rather than the deduplicated count: the gradient-equivalence
/// identity needs the factor tied to the number of draws.
struct SketchPlan {
    std::vector<std::size_t> draws;           // k part indices, draw order
    std::vector<std::size_t> distinct_parts;  // k' <= k, first-appearance order
    std::vector<std::size_t> weights;         // k' multiplicities, sum = k
    Vec rescale;                              // k' factors 1 / sqrt(r * Pi_i)
    std::size_t r = 0;                        // k * part_size
    std::size_t k = 0;                        // number of draws
};

/// Sample k parts i.i.d. from the block scores. Zero-score parts are excluded
/// from the support; all-zero scores raise InvalidDistributionError.
SketchPlan sample_weighted(const PartitionPlan& plan, std::size_t k, SplitMix64& rng);
SketchPlan sample_weighted(const PartitionPlan& plan, std::size_t k, std::uint64_t seed);

/// Degenerate no-compression plan: every part retained once, weight 1,
/// rescale 1. Used for uncompressed baselines.
SketchPlan identity_sketch(const PartitionPlan& plan);

/// Block sampling operator S_p (k'*part_size × N): row block j selects the
/// rows of distinct part j scaled by its rescale factor. One nonzero per row.
Mat build_Sp(const PartitionPlan& plan, const SketchPlan& sp);

/// Weighted operator S_hat = sqrt(W) * S_p where W repeats each multiplicity
/// part_size times along the diagonal.
Mat build_Shat(const PartitionPlan& plan, const SketchPlan& sp);

/// Classic row-sampling sketch (r × N): r rows drawn i.i.d. from pi, row t
/// scaled by 1 / sqrt(r * pi_i). Same inverse-CDF stream as sample_weighted,
/// so under singleton parts both consume a seed into the same draw sequence.
Mat build_classic_sketch(std::span<const double> pi, std::size_t r, SplitMix64& rng);
Mat build_classic_sketch(std::span<const double> pi, std::size_t r, std::uint64_t seed);

}  // namespace levcode
