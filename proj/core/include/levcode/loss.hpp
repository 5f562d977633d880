#pragma once

#include <cstddef>

#include "levcode/matrix.hpp"
#include "levcode/partition.hpp"
#include "levcode/sketch.hpp"

namespace levcode {

enum class LossKind { LeastSquares, Logistic };

/// Additively separable loss over rows of (X, y).
///   least squares: sum_i (x_iᵀ θ - y_i)², gradient 2 Xᵀ(Xθ - y)
///   logistic:      sum_i log(1 + exp(-y_i x_iᵀ θ)), labels in {-1, +1}
struct LossModel {
    LossKind kind = LossKind::LeastSquares;
    Mat X;
    Vec y;

    static LossModel least_squares(Mat X, Vec y);
    static LossModel logistic(Mat X, Vec y);

    std::size_t n_rows() const { return X.rows(); }
    std::size_t dim() const { return X.cols(); }
};

double loss_value(const LossModel& model, std::span<const double> theta);

/// Gradient restricted to rows [row_begin, row_end).
Vec partial_gradient(const LossModel& model, std::size_t row_begin, std::size_t row_end,
                     std::span<const double> theta);

/// Same, with every row of X (and y, for least squares) scaled by `scale`
/// first. Used for sampled-part gradients without materializing copies.
Vec partial_gradient_scaled(const LossModel& model, std::size_t row_begin, std::size_t row_end,
                            double scale, std::span<const double> theta);

Vec full_gradient(const LossModel& model, std::span<const double> theta);

/// Gradient of the sketched least-squares loss sum_i ((S X θ)_i - (S y)_i)²,
/// i.e. 2 (SX)ᵀ (SXθ - Sy). Least-squares models only.
Vec sketched_ls_gradient(const Mat& S, const LossModel& model, std::span<const double> theta);

/// Weighted sampled-part gradient sum_j w_j * grad_j where grad_j is the
/// partial gradient on distinct part j after rescaling its rows by the plan
/// factor. For least squares this equals sketched_ls_gradient on S_hat.
Vec weighted_gradient(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                      std::span<const double> theta);

/// Same with explicit per-distinct-part weights (e.g. all ones to discard
/// the sampling multiplicities).
Vec weighted_gradient(const LossModel& model, const PartitionPlan& plan, const SketchPlan& sp,
                      std::span<const double> weights, std::span<const double> theta);

}  // namespace levcode
