#include "levcode/gd.hpp"

#include <cmath>

namespace levcode {

GdTrace gd(const LossModel& model, const GradFn& grad_fn, const GdConfig& config) {
    if (!(config.step > 0.0)) throw InvalidInputError("gd: step must be positive");
    if (!(config.grad_tol > 0.0)) throw InvalidInputError("gd: grad_tol must be positive");

    GdTrace trace;
    Vec theta(model.dim(), 0.0);

    for (std::size_t t = 0; t < config.max_iters; ++t) {
        const Vec g = grad_fn(theta, t);
        if (g.size() != theta.size()) throw ArityError("gd: gradient length != theta length");
        const double gn = norm2(g);
        if (!std::isfinite(gn) || gn > 1e12) {
            trace.final_theta = theta;
            trace.iterations = t;
            throw DivergenceError("gd: gradient norm " + std::to_string(gn) +
                                      " exceeded the divergence threshold at iteration " +
                                      std::to_string(t),
                                  std::move(trace));
        }
        trace.records.push_back({t, gn, loss_value(model, theta), {}});
        if (config.record_thetas) trace.thetas.push_back(theta);
        if (gn < config.grad_tol) {
            trace.final_theta = std::move(theta);
            trace.iterations = t;
            trace.converged = true;
            return trace;
        }
        axpy(-config.step, g, theta);
    }
    trace.final_theta = std::move(theta);
    trace.iterations = config.max_iters;
    trace.converged = false;
    return trace;
}

}  // namespace levcode
