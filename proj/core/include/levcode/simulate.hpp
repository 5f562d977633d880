#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "levcode/coding.hpp"
#include "levcode/gd.hpp"
#include "levcode/loss.hpp"
#include "levcode/matrix.hpp"
#include "levcode/rng.hpp"
#include "levcode/sketch.hpp"

namespace levcode {

/// Erasure model for one round. Stragglers are erased, not delayed: the
/// simulator is logical-time, since the decoding guarantees are properties of
/// the erasure pattern only.
enum class StragglerKind { None, UniformRandom, FixedSet };

struct StragglerModel {
    StragglerKind kind = StragglerKind::None;
    std::size_t s_actual = 0;                // <= params.s
    std::vector<std::size_t> fixed;          // FixedSet only, size s_actual

    static StragglerModel none();
    static StragglerModel uniform(std::size_t s_actual);
    static StragglerModel fixed_set(std::vector<std::size_t> stragglers);
};

/// Encoding scheme with the weight vector attached: Btilde = B diag(w) where
/// w holds the sampling multiplicities for the first k' columns and zero for
/// the padding columns. Padding keeps the scheme's k columns without
/// re-deriving code parameters per draw; zero-weight columns vanish from
/// every message, so decode correctness is unaffected.
struct WeightedScheme {
    CodingScheme scheme;
    CMat Btilde;
    Vec weights;                 // length k
    std::size_t k_distinct = 0;  // leading columns with real parts behind them

    // B_ext * diag(w); the simulator encodes from this copy (see
    // CodingScheme::B_ext).
    std::vector<std::complex<long double>> Btilde_ext;
};

WeightedScheme attach_weights(CodingScheme scheme, std::span<const double> weights_distinct);
WeightedScheme attach_weights(CodingScheme scheme, const SketchPlan& sp);

/// Per-worker instrumentation: which part (column) indices each worker read
/// while computing its message.
struct EncodeStats {
    std::vector<std::vector<std::size_t>> parts_read;  // n entries
};

/// Worker messages: row i is sum_j Btilde_{ij} g_j over worker i's mask
/// support (w_supp terms); partials is the k×p matrix of partial gradients.
CMat encode_tasks(const WeightedScheme& ws, const Mat& partials, EncodeStats* stats = nullptr);

/// Responder set of exactly f workers. With s_actual < s the surplus
/// responders are dropped uniformly at random so decode always sees f rows.
std::vector<std::size_t> select_responders(const StragglerModel& model, const CodingParams& params,
                                           SplitMix64& rng);
std::vector<std::size_t> select_responders(const StragglerModel& model, const CodingParams& params,
                                           std::uint64_t seed);

/// One decoded round: real part of a_Iᵀ * messages, with the imaginary
/// residual reported and a conditioning warning when it exceeds
/// 1e-7 * (1 + ||decoded||).
struct RoundResult {
    std::vector<std::size_t> responders;
    Vec decoded;
    double imag_residual = 0.0;
    double decode_residual = 0.0;
    bool conditioning_warning = false;
    std::vector<std::size_t> messages_per_worker;  // n entries, 1 if used
};

RoundResult decode_round(const WeightedScheme& ws, std::span<const std::size_t> responders,
                         const CMat& messages);

/// Full distributed descent: per iteration, compute the k' rescaled-part
/// partial gradients, encode across n workers, erase stragglers, decode the
/// weighted gradient from the f survivors and step. Produces the same
/// iterates as gd() driven by weighted_gradient, up to decode round-off.
GdTrace run_distributed_gd(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                           const CodingScheme& scheme, const GdConfig& config,
                           const StragglerModel& straggler, std::uint64_t straggler_seed);

/// Same with explicit per-distinct-part weights (unweighted pipelines pass
/// all ones).
GdTrace run_distributed_gd(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                           std::span<const double> weights_distinct, const CodingScheme& scheme,
                           const GdConfig& config, const StragglerModel& straggler,
                           std::uint64_t straggler_seed);

}  // namespace levcode
