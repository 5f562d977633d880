#pragma once

#include <cstddef>
#include <utility>

#include "levcode/matrix.hpp"

namespace levcode {

/// Split of N rows into K equipotent contiguous parts, with the block score
/// of each part: Pi_i = sum of the normalized row scores pi over the part.
/// Rows are assumed already shuffled upstream; parts are plain index ranges.
struct PartitionPlan {
    std::size_t N = 0;
    std::size_t K = 0;
    std::size_t part_size = 0;
    Vec Pi;

    /// Half-open row range [begin, end) of part i.
    std::pair<std::size_t, std::size_t> part_range(std::size_t i) const {
        return {i * part_size, (i + 1) * part_size};
    }
};

/// Build the plan. Requires K | N and pi a probability vector of length N
/// (nonnegative, summing to 1 within 1e-9).
PartitionPlan make_partition(std::size_t N, std::size_t K, std::span<const double> pi);

}  // namespace levcode
