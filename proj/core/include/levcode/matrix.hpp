#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "levcode/errors.hpp"

namespace levcode {

using Vec = std::vector<double>;
using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

/// Dense real matrix, row-major. Entries are validated to be finite when a
/// matrix is built from caller-supplied data.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
    Mat(std::size_t rows, std::size_t cols, Vec entries);

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

    Vec& data() { return entries_; }
    const Vec& data() const { return entries_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec entries_;
};

/// Dense complex matrix, row-major; real and imaginary parts finite.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}
    CMat(std::size_t rows, std::size_t cols, CVec entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<Complex> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
    std::span<const Complex> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

    CVec& data() { return entries_; }
    const CVec& data() const { return entries_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CVec entries_;
};

// Dense kernels. Shapes are checked; mismatches raise ArityError.
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Vec matvec(const Mat& a, std::span<const double> x);
Vec matvec_transposed(const Mat& a, std::span<const double> x);  // aᵀ x
CMat cmatmul(const CMat& a, const CMat& b);

double frob_norm(const Mat& a);
double max_abs(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b);
double cmax_abs_diff(const CMat& a, const CMat& b);

// Small vector helpers used throughout.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x

}  // namespace levcode
