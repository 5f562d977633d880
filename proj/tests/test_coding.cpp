#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "levcode/coding.hpp"
#include "levcode/rng.hpp"
#include "test_util.hpp"

using namespace levcode;
using namespace levcode::testutil;

namespace {

std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t f) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> comb(f);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
        out.push_back(comb);
        std::size_t i = f;
        bool advanced = false;
        while (i-- > 0) {
            if (comb[i] != i + n - f) {
                ++comb[i];
                for (std::size_t j = i + 1; j < f; ++j) comb[j] = comb[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    return out;
}

// a_I^T M_I for the rows of M indexed by the responder set
CVec decode_apply(const CVec& a, const CMat& m, const std::vector<std::size_t>& subset) {
    CVec out(m.cols(), Complex{0.0, 0.0});
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < subset.size(); ++i) out[j] += a[i] * m(subset[i], j);
    return out;
}

CodingScheme small_scheme() {
    return build_scheme(validate_params(6, 4, 3), cyclic_mask(validate_params(6, 4, 3)));
}

}  // namespace

TEST_CASE("validate_params derives the balanced quantities") {
    const CodingParams paper = validate_params(50, 20, 30);
    CHECK(paper.w_supp == 12);
    CHECK(paper.s == 29);
    CHECK(paper.f == 21);

    const CodingParams small = validate_params(6, 4, 3);
    CHECK(small.w_supp == 2);
    CHECK(small.s == 2);
    CHECK(small.f == 4);

    CHECK_THROWS_AS(validate_params(4, 3, 2), InfeasibleParamsError);
    CHECK_THROWS_AS(validate_params(4, 3, 5), InfeasibleParamsError);
    CHECK_THROWS_AS(validate_params(0, 3, 1), InfeasibleParamsError);

    const CodingParams trivial = validate_params(1, 1, 1);
    CHECK(trivial.f == 1);
    CHECK(trivial.w_supp == 1);
}

TEST_CASE("cyclic_mask tiles the workers evenly") {
    const AssignmentMask eye = cyclic_mask(validate_params(4, 4, 1));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(eye.at(i, j) == (i == j));

    const CodingParams small = validate_params(6, 4, 3);
    const AssignmentMask mask = cyclic_mask(small);
    CHECK(mask.column_support(0) == std::vector<std::size_t>{0, 1, 2});
    for (std::size_t i = 0; i < 6; ++i) CHECK(mask.row_support(i).size() == 2);

    const CodingParams paper = validate_params(50, 20, 30);
    const AssignmentMask big = cyclic_mask(paper);
    for (std::size_t i = 0; i < 50; ++i) CHECK(big.row_support(i).size() == 12);
    for (std::size_t j = 0; j < 20; ++j) CHECK(big.column_support(j).size() == 30);
}

TEST_CASE("full replication gives the all-ones encoding matrix") {
    const CodingParams params = validate_params(5, 3, 5);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    CHECK(scheme.T.rows() == 1);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(scheme.B(i, j) == Complex{1.0, 0.0});
}

TEST_CASE("B vanishes exactly off the mask and factors as G*T") {
    const CodingScheme scheme = small_scheme();
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            if (!scheme.mask.at(i, j))
                CHECK(scheme.B(i, j) == Complex{0.0, 0.0});
            else
                CHECK(std::abs(scheme.B(i, j)) > 1e-12);
        }

    // independent Vandermonde route: plain complex powers
    CMat g(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t t = 0; t < 4; ++t)
            g(i, t) = std::pow(scheme.eval_points[i], static_cast<double>(t));
    CHECK(cmax_abs_diff(scheme.B, cmatmul(g, scheme.T)) <= 1e-9);

    for (std::size_t j = 0; j < 4; ++j) CHECK(scheme.T(0, j) == Complex{1.0, 0.0});
}

TEST_CASE("experiment-scale scheme keeps the balanced support and factorization") {
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    for (std::size_t i = 0; i < 50; ++i) {
        std::size_t nonzeros = 0;
        for (std::size_t j = 0; j < 20; ++j)
            if (scheme.B(i, j) != Complex{0.0, 0.0}) ++nonzeros;
        CHECK(nonzeros == 12);
    }
    // the coefficients reach ~2e5 here, so evaluate the product in extended
    // precision; plain double arithmetic would bury the claim in its own
    // rounding
    using LC = std::complex<long double>;
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 20; ++j) {
            LC acc{0.0L, 0.0L};
            for (std::size_t t = 0; t < 21; ++t) {
                const long double angle = two_pi * static_cast<long double>((i * t) % 50) / 50.0L;
                const LC power{std::cos(angle), std::sin(angle)};
                acc += power * LC{scheme.T(t, j).real(), scheme.T(t, j).imag()};
            }
            acc -= LC{scheme.B(i, j).real(), scheme.B(i, j).imag()};
            worst = std::max(worst, static_cast<double>(std::abs(acc)));
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("build_scheme rejects an unbalanced mask") {
    const CodingParams params = validate_params(6, 4, 3);
    AssignmentMask mask = cyclic_mask(params);
    mask.cells[0] = mask.cells[0] ? 0 : 1;
    CHECK_THROWS_AS(build_scheme(params, mask), InvalidInputError);
}

TEST_CASE("decode_vector for the one-worker code is unity") {
    const CodingParams params = validate_params(1, 1, 1);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const std::vector<std::size_t> all{0};
    const DecodeVector dv = decode_vector(scheme, all);
    CHECK(std::abs(dv.a[0] - Complex{1.0, 0.0}) < 1e-14);
}

TEST_CASE("decode identity holds for every responder set of the small scheme") {
    const CodingScheme scheme = small_scheme();
    for (const auto& subset : all_subsets(6, 4)) {
        const DecodeVector dv = decode_vector(scheme, subset);
        CHECK(dv.residual <= 1e-8);
        CHECK_FALSE(dv.conditioning_warning);
        const CVec ones = decode_apply(dv.a, scheme.B, subset);
        for (const Complex& v : ones) CHECK(std::abs(v - Complex{1.0, 0.0}) <= 1e-8);
    }
}

TEST_CASE("decode_vector validates the responder set") {
    const CodingScheme scheme = small_scheme();
    CHECK_THROWS_AS(decode_vector(scheme, std::vector<std::size_t>{0, 1, 2}), ArityError);
    CHECK_THROWS_AS(decode_vector(scheme, std::vector<std::size_t>{0, 1, 2, 2}),
                    InvalidInputError);
    CHECK_THROWS_AS(decode_vector(scheme, std::vector<std::size_t>{0, 1, 2, 9}),
                    InvalidInputError);
}

TEST_CASE("weighting columns decodes to the weight vector, exhaustively") {
    const CodingScheme scheme = small_scheme();
    const Vec w{3.0, 1.0, 1.0, 2.0};
    const CMat bt = weight_scheme(scheme, w);
    for (const auto& subset : all_subsets(6, 4)) {
        const DecodeVector dv = decode_vector(scheme, subset);
        const CVec got = decode_apply(dv.a, bt, subset);
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(got[j] - Complex{w[j], 0.0}) <= 1e-8);
    }
}

TEST_CASE("unit weights reduce to the plain scheme and zero weights kill columns") {
    const CodingScheme scheme = small_scheme();
    const CMat bt_ones = weight_scheme(scheme, Vec{1.0, 1.0, 1.0, 1.0});
    CHECK(cmax_abs_diff(bt_ones, scheme.B) == 0.0);

    const CMat bt_gap = weight_scheme(scheme, Vec{1.0, 0.0, 1.0, 1.0});
    for (std::size_t i = 0; i < 6; ++i) CHECK(bt_gap(i, 1) == Complex{0.0, 0.0});
    const std::vector<std::size_t> subset{0, 2, 3, 5};
    const DecodeVector dv = decode_vector(scheme, subset);
    const CVec got = decode_apply(dv.a, bt_gap, subset);
    CHECK(std::abs(got[1]) <= 1e-10);

    CHECK_THROWS_AS(weight_scheme(scheme, Vec{1.0, 2.0}), ArityError);
}

TEST_CASE("weighted decode identity across every small balanced scheme") {
    const std::tuple<std::size_t, std::size_t, std::size_t> shapes[] = {
        {6, 4, 3}, {8, 4, 4}, {9, 3, 3}, {10, 5, 4}};
    SplitMix64 rng(2025);
    for (const auto& [n, k, d] : shapes) {
        const CodingParams params = validate_params(n, k, d);
        const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
        Vec w(k);
        for (double& v : w) v = rng.next_uniform(-2.0, 2.0);
        const CMat bt = weight_scheme(scheme, w);
        double worst = 0.0;
        for (const auto& subset : all_subsets(n, params.f)) {
            const DecodeVector dv = decode_vector(scheme, subset);
            const CVec got = decode_apply(dv.a, bt, subset);
            for (std::size_t j = 0; j < k; ++j)
                worst = std::max(worst, std::abs(got[j] - Complex{w[j], 0.0}));
        }
        CAPTURE(n);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("complex weight vectors decode the same way") {
    const CodingScheme scheme = small_scheme();
    SplitMix64 rng(4096);
    CVec w(4);
    for (Complex& v : w) v = Complex{rng.next_uniform(-1.0, 1.0), rng.next_uniform(-1.0, 1.0)};
    const CMat bt = weight_scheme(scheme, w);
    for (const auto& subset : all_subsets(6, 4)) {
        const DecodeVector dv = decode_vector(scheme, subset);
        const CVec got = decode_apply(dv.a, bt, subset);
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(got[j] - w[j]) <= 1e-8);
    }
}

TEST_CASE("closed form and elimination agree at experiment scale") {
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    SplitMix64 rng(11);
    std::vector<std::size_t> all(50);
    std::iota(all.begin(), all.end(), 0);
    for (int rep = 0; rep < 20; ++rep) {
        rng.shuffle(all);
        std::vector<std::size_t> subset(all.begin(), all.begin() + 21);
        std::sort(subset.begin(), subset.end());
        const DecodeVector dv = decode_vector(scheme, subset);
        CHECK(dv.residual <= 1e-6);
        CHECK_FALSE(dv.conditioning_warning);
    }
}
