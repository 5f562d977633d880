#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "levcode/errors.hpp"
#include "levcode/loss.hpp"
#include "levcode/matrix.hpp"

namespace levcode {

struct GdConfig {
    double step = 1e-7;
    std::size_t max_iters = 1000;
    double grad_tol = 0.1;     // stop when ||g||_2 < grad_tol
    bool record_thetas = false;
};

struct GdRecord {
    std::size_t iter = 0;
    double grad_norm = 0.0;
    double loss = 0.0;
    std::vector<std::size_t> responders;  // filled by the distributed driver
};

struct GdTrace {
    std::vector<GdRecord> records;
    Vec final_theta;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t conditioning_warnings = 0;  // decode warnings, distributed runs
    std::vector<Vec> thetas;  // per-record iterate, only when record_thetas
};

/// Gradient norm exceeded 1e12; the partial trace is attached.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, GdTrace trace)
        : Error(msg), trace(std::move(trace)) {}
    GdTrace trace;
};

using GradFn = std::function<Vec(std::span<const double> theta, std::size_t iter)>;

/// Fixed-step descent from theta_0 = 0: theta_{t+1} = theta_t - step * g_t,
/// stopping when ||g_t|| < grad_tol (converged, the step is not taken) or
/// after max_iters steps. Each evaluated iterate is recorded with its
/// gradient norm and the model's full-data loss.
GdTrace gd(const LossModel& model, const GradFn& grad_fn, const GdConfig& config);

}  // namespace levcode
