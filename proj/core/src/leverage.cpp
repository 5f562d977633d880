#include "levcode/leverage.hpp"

#include <string>

namespace levcode {

LeverageProfile leverage_profile(const SvdResult& svd, double rank_rel_tol) {
    LeverageProfile prof;
    prof.rank = numerical_rank(svd.sigma, rank_rel_tol);
    prof.ell.assign(svd.U.rows(), 0.0);
    for (std::size_t i = 0; i < svd.U.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < prof.rank; ++j) s += svd.U(i, j) * svd.U(i, j);
        prof.ell[i] = s;
    }
    return prof;
}

LeverageProfile leverage_profile(const Mat& x, double rank_rel_tol) {
    return leverage_profile(reduced_svd(x), rank_rel_tol);
}

Vec leverage_scores(const Mat& x) {
    const SvdResult svd = reduced_svd(x);
    LeverageProfile prof = leverage_profile(svd);
    if (prof.rank < x.cols()) {
        throw RankDeficiencyError("leverage_scores: matrix is rank deficient (numerical rank " +
                                      std::to_string(prof.rank) + " of " +
                                      std::to_string(x.cols()) + " columns)",
                                  prof.rank);
    }
    return std::move(prof.ell);
}

Vec normalize_scores(std::span<const double> ell) {
    double total = 0.0;
    for (double v : ell) {
        if (v < 0.0) throw InvalidDistributionError("normalize_scores: negative score");
        total += v;
    }
    if (ell.empty() || total <= 0.0)
        throw InvalidDistributionError("normalize_scores: scores sum to zero");
    Vec pi(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) pi[i] = ell[i] / total;
    return pi;
}

}  // namespace levcode
