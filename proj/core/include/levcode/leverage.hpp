#pragma once

#include "levcode/matrix.hpp"
#include "levcode/svd.hpp"

namespace levcode {

/// Leverage scores of a matrix together with its numerical rank. The score of
/// row i is the squared Euclidean norm of the i-th row of the rank-truncated
/// left singular basis, equivalently the i-th diagonal entry of the hat
/// projector X X⁺. Scores sum to the rank.
struct LeverageProfile {
    Vec ell;
    std::size_t rank = 0;
};

/// Scores from an already computed SVD, keeping the leading `rank` columns.
LeverageProfile leverage_profile(const SvdResult& svd, double rank_rel_tol = 1e-10);
LeverageProfile leverage_profile(const Mat& x, double rank_rel_tol = 1e-10);

/// Strict leverage scores: requires full column rank (smallest singular value
/// above 1e-10 * largest), otherwise raises RankDeficiencyError naming the
/// numerical rank. Each score lies in [0, 1] and they sum to cols(x).
Vec leverage_scores(const Mat& x);

/// Normalize nonnegative scores into the sampling distribution
/// pi_i = ell_i / sum(ell). All-zero input raises InvalidDistributionError.
Vec normalize_scores(std::span<const double> ell);

}  // namespace levcode
