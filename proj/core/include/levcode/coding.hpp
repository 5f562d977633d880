#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "levcode/matrix.hpp"

namespace levcode {

/// Code parameters tying n workers to k data parts: every part goes to d
/// workers, every worker holds w_supp parts (n * w_supp = k * d), and the
/// decoder tolerates s = d - 1 stragglers, i.e. needs f = n - s responses.
struct CodingParams {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;
    std::size_t w_supp = 0;
    std::size_t s = 0;
    std::size_t f = 0;
};

/// Validates (n, k, d) and derives w_supp, s, f. Raises
/// InfeasibleParamsError when n does not divide k*d or d > n.
CodingParams validate_params(std::size_t n, std::size_t k, std::size_t d);

/// n×k binary assignment of parts to workers: column j has exactly d ones,
/// row i exactly w_supp ones.
struct AssignmentMask {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint8_t> cells;  // row-major 0/1

    bool at(std::size_t i, std::size_t j) const { return cells[i * k + j] != 0; }
    std::vector<std::size_t> row_support(std::size_t i) const;
    std::vector<std::size_t> column_support(std::size_t j) const;
};

/// Balanced cyclic assignment: column j covers workers
/// {(j*d + t) mod n : t = 0..d-1}. Because k*d is a multiple of n the shifted
/// blocks tile the workers exactly w_supp times.
AssignmentMask cyclic_mask(const CodingParams& params);

/// Evaluation-code encoding scheme over the n-th roots of unity
/// a_i = exp(2*pi*sqrt(-1)*i/n). Column j of B evaluates the polynomial
///
///   p_j(x) = prod_{i in Z_j} (x - a_i) / prod_{i in Z_j} (-a_i),
///
/// where Z_j is the set of workers NOT assigned part j (|Z_j| = n - d), so
/// p_j vanishes exactly on the unassigned workers and p_j(0) = 1. T holds the
/// polynomial coefficients column-wise, constant term first, giving the
/// factorization B = G T with G the n×f Vandermonde on the evaluation points.
struct CodingScheme {
    CodingParams params;
    AssignmentMask mask;
    CMat B;            // n×k, product-form evaluation (exact zeros off support)
    CMat T;            // f×k coefficients, first row all ones
    CVec eval_points;  // n roots of unity

    // Extended-precision copy of B (flat row-major). The decode identity
    // a_I^T B_I = 1 is responder-set invariant only for the exact matrix;
    // the simulator's round trip uses this copy so that different erasure
    // patterns decode to the same gradient beyond double rounding of B.
    std::vector<std::complex<long double>> B_ext;
};

CodingScheme build_scheme(const CodingParams& params, const AssignmentMask& mask);

/// Decode coefficients for a responder set I of size f, i.e. the first row of
/// G_I^{-1}: a_I satisfies a_Iᵀ G_I = e_1ᵀ and hence a_Iᵀ B_I = 1_{1×k}.
/// Computed two ways, a Lagrange closed form
///   a_i = prod_{j in I, j != i} a_j / (a_j - a_i)
/// and partial-pivoting elimination on G_Iᵀ a = e_1; the candidate with the
/// smaller residual is returned. Disagreement beyond 1e-8 or a residual above
/// 1e-6 sets the conditioning flag rather than failing: subsets of the roots
/// of unity can be arbitrarily ill conditioned for large n, and tolerances
/// are reported, not hidden.
struct DecodeVector {
    CVec a;                             // f coefficients
    double residual = 0.0;              // max |a^T G_I - e_1^T|
    bool conditioning_warning = false;
};

DecodeVector decode_vector(const CodingScheme& scheme, std::span<const std::size_t> responders);

/// Extended-precision decode route. The encode/decode round trip cancels
/// most digits of intermediates that reach ~1e6 at n=50, so the simulator
/// keeps coefficients (and in-flight messages) in long double; the plain
/// decode_vector is this result rounded to double.
struct DecodeVectorExt {
    std::vector<std::complex<long double>> a;
    double residual = 0.0;
    bool conditioning_warning = false;
};

DecodeVectorExt decode_vector_ext(const CodingScheme& scheme,
                                  std::span<const std::size_t> responders);

/// Column-scaled encoding matrix B * diag(w): decoding any responder set then
/// yields the weighted combination a_Iᵀ (B diag(w))_I = w.
CMat weight_scheme(const CodingScheme& scheme, std::span<const double> wvec);
CMat weight_scheme(const CodingScheme& scheme, std::span<const Complex> wvec);

}  // namespace levcode
