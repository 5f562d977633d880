#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "levcode/datasets.hpp"
#include "levcode/leverage.hpp"
#include "levcode/simulate.hpp"
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
        bool adv = false;
        while (i-- > 0) {
            if (comb[i] != i + n - f) {
                ++comb[i];
                for (std::size_t j = i + 1; j < f; ++j) comb[j] = comb[j - 1] + 1;
                adv = true;
                break;
            }
        }
        if (!adv) break;
    }
    return out;
}

CodingScheme scheme_643() {
    const CodingParams params = validate_params(6, 4, 3);
    return build_scheme(params, cyclic_mask(params));
}

CMat rows_of(const CMat& m, const std::vector<std::size_t>& idx) {
    CMat out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(m.row(idx[i]).begin(), m.row(idx[i]).end(), out.row(i).begin());
    return out;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
    return max_abs_diff_vec(a, b) / (1.0 + std::max(max_abs_vec(a), max_abs_vec(b)));
}

}  // namespace

TEST_CASE("attach_weights pads to k columns with zeros") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec{2.0, 3.0});
    CHECK(ws.k_distinct == 2);
    CHECK(ws.weights == Vec{2.0, 3.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(ws.Btilde(i, 2) == Complex{0.0, 0.0});
        CHECK(ws.Btilde(i, 3) == Complex{0.0, 0.0});
    }
    CHECK_THROWS_AS(attach_weights(scheme_643(), Vec(5, 1.0)), ConsistencyError);
}

TEST_CASE("full replication encodes every message as the plain gradient sum") {
    const CodingParams params = validate_params(5, 3, 5);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const WeightedScheme ws = attach_weights(scheme, Vec(3, 1.0));
    const Mat partials = random_matrix(3, 4, 7);
    const CMat messages = encode_tasks(ws, partials);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t c = 0; c < 4; ++c) {
            const double expected = partials(0, c) + partials(1, c) + partials(2, c);
            CHECK(std::abs(messages(i, c) - Complex{expected, 0.0}) < 1e-12);
        }
}

TEST_CASE("encode matches the dense Btilde * g product") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec{3.0, 1.0, 1.0, 2.0});
    const Mat partials = random_matrix(4, 5, 17);
    const CMat messages = encode_tasks(ws, partials);

    CMat dense_g(4, 5);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t c = 0; c < 5; ++c) dense_g(i, c) = Complex{partials(i, c), 0.0};
    const CMat expected = cmatmul(ws.Btilde, dense_g);
    CHECK(cmax_abs_diff(messages, expected) <= 1e-12);
}

TEST_CASE("a zero-weight partition contributes to no message") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec{1.0, 0.0, 1.0, 1.0});
    Mat partials = random_matrix(4, 3, 27);
    const CMat with_junk = encode_tasks(ws, partials);
    for (std::size_t c = 0; c < 3; ++c) partials(1, c) = 0.0;
    const CMat without = encode_tasks(ws, partials);
    CHECK(cmax_abs_diff(with_junk, without) == 0.0);
}

TEST_CASE("workers read exactly their assigned parts") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec{3.0, 1.0, 1.0, 2.0});
    const Mat partials = random_matrix(4, 3, 37);
    EncodeStats stats;
    encode_tasks(ws, partials, &stats);
    REQUIRE(stats.parts_read.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(stats.parts_read[i].size() == ws.scheme.params.w_supp);
        for (std::size_t j : stats.parts_read[i]) CHECK(ws.scheme.mask.at(i, j));
    }
    CHECK_THROWS_AS(encode_tasks(ws, random_matrix(3, 3, 1)), ArityError);
}

TEST_CASE("select_responders without stragglers returns the first f workers") {
    const CodingParams params = validate_params(6, 4, 3);
    const auto r = select_responders(StragglerModel::none(), params, 1);
    CHECK(r == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("a fixed straggler set erases exactly those workers") {
    const CodingParams params = validate_params(6, 4, 3);
    const auto r = select_responders(StragglerModel::fixed_set({0, 1}), params, 1);
    CHECK(r == std::vector<std::size_t>{2, 3, 4, 5});
    CHECK_THROWS_AS(select_responders(StragglerModel::fixed_set({0, 1, 2}), params, 1),
                    InvalidInputError);
    CHECK_THROWS_AS(select_responders(StragglerModel::fixed_set({9}), params, 1),
                    InvalidInputError);
}

TEST_CASE("uniform stragglers exclude each worker at rate s/n") {
    const CodingParams params = validate_params(6, 4, 3);
    Vec excluded(6, 0.0);
    SplitMix64 rng(2718);
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto r = select_responders(StragglerModel::uniform(2), params, rng);
        REQUIRE(r.size() == 4);
        std::vector<bool> in(6, false);
        for (std::size_t i : r) in[i] = true;
        for (std::size_t i = 0; i < 6; ++i)
            if (!in[i]) excluded[i] += 1.0;
    }
    for (std::size_t i = 0; i < 6; ++i) {
        const double freq = excluded[i] / static_cast<double>(trials);
        CHECK(std::abs(freq - 2.0 / 6.0) <= 0.02);
    }
}

TEST_CASE("fewer actual stragglers still yield exactly f responders") {
    const CodingParams params = validate_params(6, 4, 3);
    SplitMix64 rng(31);
    for (int t = 0; t < 100; ++t) {
        const auto r = select_responders(StragglerModel::uniform(1), params, rng);
        CHECK(r.size() == 4);
        CHECK(std::is_sorted(r.begin(), r.end()));
    }
    const auto r2 = select_responders(StragglerModel::fixed_set({5}), params, 77);
    CHECK(r2.size() == 4);
}

TEST_CASE("decode of a single-partition scheme returns the weighted gradient") {
    const CodingParams params = validate_params(2, 1, 2);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const WeightedScheme ws = attach_weights(scheme, Vec{2.5});
    const Mat partials = random_matrix(1, 3, 47);
    const CMat messages = encode_tasks(ws, partials);
    const std::vector<std::size_t> responders{0};
    const RoundResult rr = decode_round(ws, responders, rows_of(messages, responders));
    for (std::size_t c = 0; c < 3; ++c)
        CHECK(rr.decoded[c] == doctest::Approx(2.5 * partials(0, c)).epsilon(1e-10));
}

TEST_CASE("decode recovers the weighted sum for every responder set") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec{3.0, 1.0, 1.0, 2.0});
    const Mat partials = random_matrix(4, 3, 57);
    const CMat messages = encode_tasks(ws, partials);

    Vec expected(3, 0.0);
    const Vec w{3.0, 1.0, 1.0, 2.0};
    for (std::size_t j = 0; j < 4; ++j) axpy(w[j], partials.row(j), expected);

    for (const auto& subset : all_subsets(6, 4)) {
        const RoundResult rr = decode_round(ws, subset, rows_of(messages, subset));
        CHECK(max_abs_diff_vec(rr.decoded, expected) <= 1e-8);
        CHECK(rr.imag_residual <= 1e-7 * (1.0 + norm2(rr.decoded)));
        CHECK_FALSE(rr.conditioning_warning);
        std::size_t used = std::accumulate(rr.messages_per_worker.begin(),
                                           rr.messages_per_worker.end(), std::size_t{0});
        CHECK(used == 4);
    }
}

TEST_CASE("experiment-scale decode stays within 1e-5 relative error") {
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    SplitMix64 wrng(5150);
    Vec w(20);
    for (double& v : w) v = wrng.next_uniform(0.0, 3.0);
    const WeightedScheme ws = attach_weights(scheme, w);
    const Mat partials = random_matrix(20, 8, 67);
    const CMat messages = encode_tasks(ws, partials);

    Vec expected(8, 0.0);
    for (std::size_t j = 0; j < 20; ++j) axpy(w[j], partials.row(j), expected);

    SplitMix64 rng(5151);
    std::vector<std::size_t> all(50);
    std::iota(all.begin(), all.end(), 0);
    for (int rep = 0; rep < 100; ++rep) {
        rng.shuffle(all);
        std::vector<std::size_t> subset(all.begin(), all.begin() + 21);
        std::sort(subset.begin(), subset.end());
        const RoundResult rr = decode_round(ws, subset, rows_of(messages, subset));
        CHECK(rel_diff(rr.decoded, expected) <= 1e-5);
    }
}

TEST_CASE("decode_round validates its shapes") {
    const WeightedScheme ws = attach_weights(scheme_643(), Vec(4, 1.0));
    const CMat messages(3, 2);
    CHECK_THROWS_AS(decode_round(ws, std::vector<std::size_t>{0, 1, 2}, messages), ArityError);
}

TEST_CASE("uncompressed unweighted run equals plain full-gradient descent") {
    // K = k parts, every part kept once, no rescaling, no stragglers
    const std::size_t N = 24, p = 3;
    const Mat x = random_matrix(N, p, 77);
    const Vec y = random_vec(N, 78);
    const LossModel model = LossModel::least_squares(x, y);
    const Vec pi = normalize_scores(leverage_scores(x));
    const CodingParams params = validate_params(6, 6, 3);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const PartitionPlan plan = make_partition(N, 6, pi);
    const SketchPlan sp = identity_sketch(plan);

    GdConfig cfg;
    cfg.step = 1e-3;
    cfg.max_iters = 60;
    cfg.grad_tol = 1e-9;
    cfg.record_thetas = true;

    const GdTrace net = run_distributed_gd(model, plan, sp, scheme, cfg, StragglerModel::none(), 5);
    const GdTrace plain =
        gd(model, [&](std::span<const double> t, std::size_t) { return full_gradient(model, t); },
           cfg);

    REQUIRE(net.records.size() == plain.records.size());
    for (std::size_t i = 0; i < net.thetas.size(); ++i)
        CHECK(max_abs_diff_vec(net.thetas[i], plain.thetas[i]) <= 1e-8);
    for (const GdRecord& rec : net.records) CHECK(rec.responders.size() == params.f);
}

TEST_CASE("stragglers do not change the decoded gradients or the trace") {
    const std::size_t N = 120, p = 5;
    const Mat x = random_matrix(N, p, 87, -2.0, 2.0);
    const Vec y = random_vec(N, 88, -2.0, 2.0);
    const LossModel model = LossModel::least_squares(x, y);
    const Vec pi = normalize_scores(leverage_scores(x));
    const CodingParams params = validate_params(6, 6, 3);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const PartitionPlan plan = make_partition(N, 12, pi);
    const SketchPlan sp = sample_weighted(plan, 6, 999);

    GdConfig cfg;
    cfg.step = 1e-3;
    cfg.max_iters = 20;
    cfg.grad_tol = 1e-12;
    cfg.record_thetas = true;

    const GdTrace a = run_distributed_gd(model, plan, sp, scheme, cfg,
                                         StragglerModel::uniform(params.s), 1111);
    const GdTrace b = run_distributed_gd(model, plan, sp, scheme, cfg,
                                         StragglerModel::uniform(params.s), 2222);
    REQUIRE(a.records.size() == b.records.size());
    bool responders_differ = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        if (a.records[i].responders != b.records[i].responders) responders_differ = true;
        CHECK(std::abs(a.records[i].grad_norm - b.records[i].grad_norm) <=
              1e-7 * (1.0 + a.records[i].grad_norm));
    }
    CHECK(responders_differ);  // different erasure patterns, same decode
    for (std::size_t i = 0; i < a.thetas.size(); ++i)
        CHECK(rel_diff(a.thetas[i], b.thetas[i]) <= 1e-7);
}

TEST_CASE("the network trace matches the no-network weighted-gradient oracle") {
    const SynthRegression synth = synth_regression(42);
    const LossModel model = LossModel::least_squares(synth.data.X, synth.data.y);
    const Vec pi = normalize_scores(leverage_scores(synth.data.X));
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const PartitionPlan plan = make_partition(1000, 40, pi);
    const SketchPlan sp = sample_weighted(plan, 20, 31415);

    GdConfig cfg;
    cfg.step = 1e-7;
    cfg.max_iters = 200;
    cfg.grad_tol = 1e-12;
    cfg.record_thetas = true;

    const GdTrace net = run_distributed_gd(model, plan, sp, scheme, cfg,
                                           StragglerModel::uniform(params.s), 2723);
    const GdTrace oracle =
        gd(model,
           [&](std::span<const double> t, std::size_t) {
               return weighted_gradient(model, plan, sp, t);
           },
           cfg);

    REQUIRE(net.thetas.size() == oracle.thetas.size());
    for (std::size_t i = 0; i < net.thetas.size(); ++i)
        CHECK(rel_diff(net.thetas[i], oracle.thetas[i]) <= 1e-6);
    // marginal responder sets may trip the conditioning flag; it is a
    // diagnostic, and must stay rare
    CHECK(net.conditioning_warnings <= net.records.size() / 10);
}
