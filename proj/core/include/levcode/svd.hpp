#pragma once

#include <cstddef>

#include "levcode/matrix.hpp"

namespace levcode {

/// Reduced singular value decomposition X = U diag(sigma) Vᵀ with
/// U: N×p (orthonormal columns), sigma: p (non-increasing), V: p×p.
struct SvdResult {
    Mat U;
    Vec sigma;
    Mat V;
};

/// One-sided Jacobi SVD for tall matrices (rows >= cols >= 1). Deterministic,
/// at most 60 sweeps with a 1e-12 relative off-diagonal threshold, raising
/// NumericalFailureError if the sweeps are exhausted. Exact zero columns of
/// the rotated matrix get sigma = 0 and an orthonormal completion vector in U.
SvdResult reduced_svd(const Mat& x);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const Vec& sigma, double rel_tol = 1e-10);

/// Minimum-norm least squares solution X⁺ b through an existing SVD,
/// truncating singular values below rel_tol * sigma_max.
Vec pinv_solve(const SvdResult& svd, std::span<const double> b, double rel_tol = 1e-10);

}  // namespace levcode
