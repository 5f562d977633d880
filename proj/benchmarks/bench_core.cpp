#include <benchmark/benchmark.h>

#include "levcode/coding.hpp"
#include "levcode/datasets.hpp"
#include "levcode/leverage.hpp"
#include "levcode/loss.hpp"
#include "levcode/rng.hpp"
#include "levcode/simulate.hpp"
#include "levcode/sketch.hpp"
#include "levcode/svd.hpp"

namespace {

using namespace levcode;

Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Mat m(rows, cols);
    for (double& v : m.data()) v = rng.next_uniform(-1.0, 1.0);
    return m;
}

void BM_ReducedSvd(benchmark::State& state) {
    const Mat x = random_matrix(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(1)), 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduced_svd(x));
    }
}
BENCHMARK(BM_ReducedSvd)->Args({200, 50})->Args({600, 200})->Args({2000, 800})
    ->Unit(benchmark::kMillisecond);

void BM_LeverageScores(benchmark::State& state) {
    const Mat x = random_matrix(1000, 20, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(leverage_scores(x));
    }
}
BENCHMARK(BM_LeverageScores)->Unit(benchmark::kMillisecond);

void BM_BuildScheme(benchmark::State& state) {
    const CodingParams params = validate_params(50, 20, 30);
    const AssignmentMask mask = cyclic_mask(params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_scheme(params, mask));
    }
}
BENCHMARK(BM_BuildScheme)->Unit(benchmark::kMicrosecond);

void BM_DecodeVector(benchmark::State& state) {
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    SplitMix64 rng(3);
    std::vector<std::size_t> all(params.n);
    for (std::size_t i = 0; i < params.n; ++i) all[i] = i;
    for (auto _ : state) {
        state.PauseTiming();
        rng.shuffle(all);
        std::vector<std::size_t> subset(all.begin(), all.begin() + params.f);
        std::sort(subset.begin(), subset.end());
        state.ResumeTiming();
        benchmark::DoNotOptimize(decode_vector(scheme, subset));
    }
}
BENCHMARK(BM_DecodeVector)->Unit(benchmark::kMicrosecond);

void BM_DistributedIteration(benchmark::State& state) {
    const SynthRegression synth = synth_regression(11);
    const std::size_t K = 40;
    const Vec pi = normalize_scores(leverage_scores(synth.data.X));
    const PartitionPlan plan = make_partition(synth.data.X.rows(), K, pi);
    const SketchPlan sp = sample_weighted(plan, 20, 99);
    const CodingParams params = validate_params(50, 20, 30);
    const CodingScheme scheme = build_scheme(params, cyclic_mask(params));
    const LossModel model = LossModel::least_squares(synth.data.X, synth.data.y);
    GdConfig gdc;
    gdc.step = 1e-7;
    gdc.grad_tol = 1e-30;
    gdc.max_iters = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_distributed_gd(model, plan, sp, scheme, gdc,
                                                    StragglerModel::uniform(params.s), 5));
    }
}
BENCHMARK(BM_DistributedIteration)->Unit(benchmark::kMillisecond);

void BM_WeightedGradient(benchmark::State& state) {
    const SynthRegression synth = synth_regression(11);
    const std::size_t K = 40;
    const Vec pi = normalize_scores(leverage_scores(synth.data.X));
    const PartitionPlan plan = make_partition(synth.data.X.rows(), K, pi);
    const SketchPlan sp = sample_weighted(plan, 20, 99);
    const LossModel model = LossModel::least_squares(synth.data.X, synth.data.y);
    const Vec theta(20, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(weighted_gradient(model, plan, sp, theta));
    }
}
BENCHMARK(BM_WeightedGradient)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
