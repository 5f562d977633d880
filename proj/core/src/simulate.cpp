#include "levcode/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace levcode {

namespace {

using LComplex = std::complex<long double>;

// Single implementation of the encode/decode round in extended precision;
// the public CMat entry points round at their boundaries while the
// simulator keeps messages in long double end to end.
std::vector<LComplex> encode_ext(const WeightedScheme& ws, const Mat& partials,
                                 EncodeStats* stats) {
    const CodingParams& params = ws.scheme.params;
    if (partials.rows() != params.k) throw ArityError("encode_tasks: partials rows != k");
    const std::size_t p = partials.cols();
    std::vector<LComplex> messages(params.n * p, LComplex{0.0L, 0.0L});
    if (stats) stats->parts_read.assign(params.n, {});
    for (std::size_t i = 0; i < params.n; ++i) {
        LComplex* out = messages.data() + i * p;
        for (std::size_t j = 0; j < params.k; ++j) {
            if (!ws.scheme.mask.at(i, j)) continue;
            if (stats) stats->parts_read[i].push_back(j);
            const LComplex coeff = ws.Btilde_ext[i * params.k + j];
            if (coeff == LComplex{0.0L, 0.0L}) continue;  // zero-weight padding column
            const auto row = partials.row(j);
            for (std::size_t c = 0; c < p; ++c) out[c] += coeff * static_cast<long double>(row[c]);
        }
    }
    return messages;
}

RoundResult decode_ext(const WeightedScheme& ws, std::span<const std::size_t> responders,
                       const std::vector<LComplex>& received, std::size_t p) {
    const CodingParams& params = ws.scheme.params;
    if (received.size() != params.f * p || responders.size() != params.f)
        throw ArityError("decode_round: need exactly f responder rows");

    const DecodeVectorExt dv = decode_vector_ext(ws.scheme, responders);

    RoundResult rr;
    rr.responders.assign(responders.begin(), responders.end());
    rr.decoded.assign(p, 0.0);
    rr.decode_residual = dv.residual;
    double imag_sq = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
        LComplex acc{0.0L, 0.0L};
        for (std::size_t i = 0; i < params.f; ++i) acc += dv.a[i] * received[i * p + c];
        rr.decoded[c] = static_cast<double>(acc.real());
        const double im = static_cast<double>(acc.imag());
        imag_sq += im * im;
    }
    rr.imag_residual = std::sqrt(imag_sq);
    rr.conditioning_warning =
        dv.conditioning_warning || rr.imag_residual > 1e-7 * (1.0 + norm2(rr.decoded));
    rr.messages_per_worker.assign(params.n, 0);
    for (std::size_t i : rr.responders) rr.messages_per_worker[i] = 1;
    return rr;
}

}  // namespace

StragglerModel StragglerModel::none() {
    return StragglerModel{StragglerKind::None, 0, {}};
}

StragglerModel StragglerModel::uniform(std::size_t s_actual) {
    return StragglerModel{StragglerKind::UniformRandom, s_actual, {}};
}

StragglerModel StragglerModel::fixed_set(std::vector<std::size_t> stragglers) {
    StragglerModel m;
    m.kind = StragglerKind::FixedSet;
    m.s_actual = stragglers.size();
    m.fixed = std::move(stragglers);
    return m;
}

WeightedScheme attach_weights(CodingScheme scheme, std::span<const double> weights_distinct) {
    const std::size_t k = scheme.params.k;
    if (weights_distinct.size() > k) {
        throw ConsistencyError("attach_weights: " + std::to_string(weights_distinct.size()) +
                               " distinct parts exceed the scheme's k = " + std::to_string(k));
    }
    WeightedScheme ws;
    ws.k_distinct = weights_distinct.size();
    ws.weights.assign(k, 0.0);  // padding columns carry weight zero
    std::copy(weights_distinct.begin(), weights_distinct.end(), ws.weights.begin());
    ws.Btilde = weight_scheme(scheme, std::span<const double>{ws.weights});
    ws.Btilde_ext = scheme.B_ext;
    for (std::size_t i = 0; i < scheme.params.n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            ws.Btilde_ext[i * k + j] *= static_cast<long double>(ws.weights[j]);
    ws.scheme = std::move(scheme);
    return ws;
}

WeightedScheme attach_weights(CodingScheme scheme, const SketchPlan& sp) {
    Vec w(sp.weights.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(sp.weights[j]);
    return attach_weights(std::move(scheme), w);
}

CMat encode_tasks(const WeightedScheme& ws, const Mat& partials, EncodeStats* stats) {
    const std::size_t p = partials.cols();
    const std::vector<LComplex> ext = encode_ext(ws, partials, stats);
    CMat messages(ws.scheme.params.n, p);
    for (std::size_t i = 0; i < messages.data().size(); ++i)
        messages.data()[i] = Complex{static_cast<double>(ext[i].real()),
                                     static_cast<double>(ext[i].imag())};
    return messages;
}

std::vector<std::size_t> select_responders(const StragglerModel& model, const CodingParams& params,
                                           SplitMix64& rng) {
    if (model.s_actual > params.s)
        throw InvalidInputError("straggler model: s_actual exceeds the scheme tolerance s");

    std::vector<std::size_t> survivors;
    switch (model.kind) {
        case StragglerKind::None: {
            survivors.resize(params.n);
            std::iota(survivors.begin(), survivors.end(), 0);
            break;
        }
        case StragglerKind::UniformRandom: {
            std::vector<std::size_t> perm(params.n);
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
            survivors.assign(perm.begin() + static_cast<std::ptrdiff_t>(model.s_actual),
                             perm.end());
            break;
        }
        case StragglerKind::FixedSet: {
            if (model.fixed.size() != model.s_actual)
                throw InvalidInputError("straggler model: fixed set size != s_actual");
            std::vector<std::uint8_t> out(params.n, 0);
            for (std::size_t i : model.fixed) {
                if (i >= params.n)
                    throw InvalidInputError("straggler model: fixed index out of range");
                out[i] = 1;
            }
            for (std::size_t i = 0; i < params.n; ++i)
                if (!out[i]) survivors.push_back(i);
            break;
        }
    }

    // Drop surplus survivors uniformly so decode always sees exactly f rows.
    while (survivors.size() > params.f) {
        const std::size_t victim = static_cast<std::size_t>(rng.next_below(survivors.size()));
        survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    std::sort(survivors.begin(), survivors.end());
    return survivors;
}

std::vector<std::size_t> select_responders(const StragglerModel& model, const CodingParams& params,
                                           std::uint64_t seed) {
    SplitMix64 rng(seed);
    return select_responders(model, params, rng);
}

RoundResult decode_round(const WeightedScheme& ws, std::span<const std::size_t> responders,
                         const CMat& messages) {
    if (messages.rows() != ws.scheme.params.f)
        throw ArityError("decode_round: need exactly f responder rows");
    const std::size_t p = messages.cols();
    std::vector<LComplex> received(messages.data().size());
    for (std::size_t i = 0; i < received.size(); ++i)
        received[i] = LComplex{messages.data()[i].real(), messages.data()[i].imag()};
    return decode_ext(ws, responders, received, p);
}

GdTrace run_distributed_gd(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                           const CodingScheme& scheme, const GdConfig& config,
                           const StragglerModel& straggler, std::uint64_t straggler_seed) {
    Vec w(sp.weights.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(sp.weights[j]);
    return run_distributed_gd(model, plan, sp, w, scheme, config, straggler, straggler_seed);
}

GdTrace run_distributed_gd(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                           std::span<const double> weights_distinct, const CodingScheme& scheme,
                           const GdConfig& config, const StragglerModel& straggler,
                           std::uint64_t straggler_seed) {
    if (model.n_rows() != plan.N)
        throw ConsistencyError("run_distributed_gd: model rows != plan N");
    if (weights_distinct.size() != sp.distinct_parts.size())
        throw ArityError("run_distributed_gd: weights length != distinct part count");

    const WeightedScheme ws = attach_weights(scheme, weights_distinct);
    const CodingParams& params = ws.scheme.params;
    const std::size_t p = model.dim();
    const std::size_t k_distinct = sp.distinct_parts.size();

    // Materialize the rescaled sampled parts once; these are what the workers
    // hold. Labels are rescaled only for least squares.
    std::vector<LossModel> parts;
    parts.reserve(k_distinct);
    for (std::size_t j = 0; j < k_distinct; ++j) {
        const auto [b, e] = plan.part_range(sp.distinct_parts[j]);
        const double c = sp.rescale[j];
        Mat xj(e - b, p);
        Vec yj(e - b);
        for (std::size_t i = b; i < e; ++i) {
            for (std::size_t col = 0; col < p; ++col) xj(i - b, col) = c * model.X(i, col);
            yj[i - b] = (model.kind == LossKind::LeastSquares) ? c * model.y[i] : model.y[i];
        }
        parts.push_back(model.kind == LossKind::LeastSquares
                            ? LossModel::least_squares(std::move(xj), std::move(yj))
                            : LossModel::logistic(std::move(xj), std::move(yj)));
    }

    SplitMix64 straggler_rng(straggler_seed);
    std::vector<std::vector<std::size_t>> responder_log;
    std::size_t warnings = 0;

    const GradFn network_round = [&](std::span<const double> theta, std::size_t) -> Vec {
        Mat partials(params.k, p);  // padding rows stay zero
        for (std::size_t j = 0; j < k_distinct; ++j) {
            const Vec gj = full_gradient(parts[j], theta);
            std::copy(gj.begin(), gj.end(), partials.row(j).begin());
        }
        const std::vector<LComplex> messages = encode_ext(ws, partials, nullptr);
        const std::vector<std::size_t> responders =
            select_responders(straggler, params, straggler_rng);
        std::vector<LComplex> received(params.f * p);
        for (std::size_t i = 0; i < params.f; ++i)
            std::copy(messages.begin() + static_cast<std::ptrdiff_t>(responders[i] * p),
                      messages.begin() + static_cast<std::ptrdiff_t>((responders[i] + 1) * p),
                      received.begin() + static_cast<std::ptrdiff_t>(i * p));
        const RoundResult rr = decode_ext(ws, responders, received, p);
        if (rr.conditioning_warning) ++warnings;
        responder_log.push_back(rr.responders);
        return rr.decoded;
    };

    const auto annotate = [&](GdTrace& trace) {
        for (std::size_t i = 0; i < trace.records.size() && i < responder_log.size(); ++i)
            trace.records[i].responders = responder_log[i];
        trace.conditioning_warnings = warnings;
    };

    try {
        GdTrace trace = gd(model, network_round, config);
        annotate(trace);
        return trace;
    } catch (DivergenceError& e) {
        annotate(e.trace);
        throw;
    }
}

}  // namespace levcode
