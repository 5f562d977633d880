#include "levcode/loss.hpp"

#include <cmath>
#include <string>

namespace levcode {

namespace {

// 1 / (1 + exp(m)) without overflow for large |m|.
double sigmoid_neg(double m) {
    if (m >= 0.0) {
        const double e = std::exp(-m);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(m));
}

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
    if (m >= 0.0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

void check_rows(const LossModel& model, std::size_t b, std::size_t e) {
    if (b > e || e > model.n_rows())
        throw InvalidInputError("gradient row range [" + std::to_string(b) + ", " +
                                std::to_string(e) + ") out of bounds");
}

}  // namespace

LossModel LossModel::least_squares(Mat X, Vec y) {
    if (X.rows() != y.size()) throw ArityError("least_squares: rows(X) != length(y)");
    return LossModel{LossKind::LeastSquares, std::move(X), std::move(y)};
}

LossModel LossModel::logistic(Mat X, Vec y) {
    if (X.rows() != y.size()) throw ArityError("logistic: rows(X) != length(y)");
    for (double v : y) {
        if (v != 1.0 && v != -1.0)
            throw InvalidInputError("logistic: labels must be exactly +1 or -1");
    }
    return LossModel{LossKind::Logistic, std::move(X), std::move(y)};
}

double loss_value(const LossModel& model, std::span<const double> theta) {
    if (theta.size() != model.dim()) throw ArityError("loss_value: theta length != cols");
    double total = 0.0;
    for (std::size_t i = 0; i < model.n_rows(); ++i) {
        const double margin = dot(model.X.row(i), theta);
        if (model.kind == LossKind::LeastSquares) {
            const double r = margin - model.y[i];
            total += r * r;
        } else {
            total += log1p_exp_neg(model.y[i] * margin);
        }
    }
    return total;
}

Vec partial_gradient(const LossModel& model, std::size_t row_begin, std::size_t row_end,
                     std::span<const double> theta) {
    return partial_gradient_scaled(model, row_begin, row_end, 1.0, theta);
}

Vec partial_gradient_scaled(const LossModel& model, std::size_t row_begin, std::size_t row_end,
                            double scale, std::span<const double> theta) {
    check_rows(model, row_begin, row_end);
    if (theta.size() != model.dim()) throw ArityError("partial_gradient: theta length != cols");
    Vec g(model.dim(), 0.0);
    if (model.kind == LossKind::LeastSquares) {
        // rows (c x_i, c y_i): gradient is c^2 * 2 x_i (x_i.theta - y_i)
        const double c2 = scale * scale;
        for (std::size_t i = row_begin; i < row_end; ++i) {
            const double r = dot(model.X.row(i), theta) - model.y[i];
            axpy(2.0 * c2 * r, model.X.row(i), g);
        }
    } else {
        // rows (c x_i, y_i): labels are not scaled
        for (std::size_t i = row_begin; i < row_end; ++i) {
            const double margin = model.y[i] * scale * dot(model.X.row(i), theta);
            axpy(-model.y[i] * scale * sigmoid_neg(margin), model.X.row(i), g);
        }
    }
    return g;
}

Vec full_gradient(const LossModel& model, std::span<const double> theta) {
    return partial_gradient(model, 0, model.n_rows(), theta);
}

Vec sketched_ls_gradient(const Mat& S, const LossModel& model, std::span<const double> theta) {
    if (model.kind != LossKind::LeastSquares)
        throw InvalidInputError("sketched_ls_gradient: least-squares models only");
    if (S.cols() != model.X.rows()) throw ArityError("sketched_ls_gradient: cols(S) != rows(X)");
    const Mat SX = matmul(S, model.X);
    Vec resid = matvec(SX, theta);
    const Vec Sy = matvec(S, model.y);
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= Sy[i];
    Vec g = matvec_transposed(SX, resid);
    for (double& v : g) v *= 2.0;
    return g;
}

Vec weighted_gradient(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                      std::span<const double> theta) {
    Vec w(sp.weights.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(sp.weights[j]);
    return weighted_gradient(model, plan, sp, w, theta);
}

Vec weighted_gradient(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                      std::span<const double> weights, std::span<const double> theta) {
    if (model.n_rows() != plan.N) throw ConsistencyError("weighted_gradient: model rows != plan N");
    if (weights.size() != sp.distinct_parts.size())
        throw ArityError("weighted_gradient: weights length != distinct part count");
    Vec g(model.dim(), 0.0);
    for (std::size_t j = 0; j < sp.distinct_parts.size(); ++j) {
        if (weights[j] == 0.0) continue;
        const auto [b, e] = plan.part_range(sp.distinct_parts[j]);
        const Vec gj = partial_gradient_scaled(model, b, e, sp.rescale[j], theta);
        axpy(weights[j], gj, g);
    }
    return g;
}

}  // namespace levcode
