#include "levcode/coding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace levcode {

namespace {

using LComplex = std::complex<long double>;

/// exp(2*pi*i * e / n) with the exponent reduced mod n, so high powers of the
/// evaluation points keep full angular precision.
Complex root_power(std::size_t n, std::size_t e) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(e % n) /
                         static_cast<double>(n);
    return std::polar(1.0, angle);
}

/// Extended-precision evaluation point. The decode path works in long double
/// throughout: the encoding polynomials reach magnitudes around 1e6 at n=50
/// and the decode products cancel most of those digits, so plain double
/// accumulation would leave only ~1e-7 of relative accuracy.
LComplex root_power_l(std::size_t n, std::size_t e) {
    const long double angle = 2.0L * std::numbers::pi_v<long double> *
                              static_cast<long double>(e % n) / static_cast<long double>(n);
    return {std::cos(angle), std::sin(angle)};
}

/// Solve M x = b for complex square M (flat row-major) by partial-pivoting
/// elimination, in extended precision.
std::vector<LComplex> solve_complex(std::vector<LComplex> m, std::vector<LComplex> b) {
    const std::size_t f = b.size();
    for (std::size_t col = 0; col < f; ++col) {
        std::size_t pivot = col;
        long double best = std::abs(m[col * f + col]);
        for (std::size_t r = col + 1; r < f; ++r) {
            const long double v = std::abs(m[r * f + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0L) throw NumericalFailureError("singular system in decode elimination");
        if (pivot != col) {
            for (std::size_t c = 0; c < f; ++c) std::swap(m[col * f + c], m[pivot * f + c]);
            std::swap(b[col], b[pivot]);
        }
        const LComplex inv = 1.0L / m[col * f + col];
        for (std::size_t r = col + 1; r < f; ++r) {
            const LComplex factor = m[r * f + col] * inv;
            if (factor == LComplex{0.0L, 0.0L}) continue;
            for (std::size_t c = col; c < f; ++c) m[r * f + c] -= factor * m[col * f + c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<LComplex> x(f);
    for (std::size_t r = f; r-- > 0;) {
        LComplex acc = b[r];
        for (std::size_t c = r + 1; c < f; ++c) acc -= m[r * f + c] * x[c];
        x[r] = acc / m[r * f + r];
    }
    return x;
}

}  // namespace

CodingParams validate_params(std::size_t n, std::size_t k, std::size_t d) {
    if (n < 1 || k < 1 || d < 1) throw InfeasibleParamsError("coding params must be >= 1");
    if (d > n) throw InfeasibleParamsError("replication d exceeds worker count n");
    if ((k * d) % n != 0) {
        throw InfeasibleParamsError("n = " + std::to_string(n) + " does not divide k*d = " +
                                    std::to_string(k * d) + "; no balanced assignment exists");
    }
    CodingParams p;
    p.n = n;
    p.k = k;
    p.d = d;
    p.w_supp = k * d / n;
    p.s = d - 1;
    p.f = n - p.s;
    return p;
}

std::vector<std::size_t> AssignmentMask::row_support(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < k; ++j)
        if (at(i, j)) out.push_back(j);
    return out;
}

std::vector<std::size_t> AssignmentMask::column_support(std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (at(i, j)) out.push_back(i);
    return out;
}

AssignmentMask cyclic_mask(const CodingParams& params) {
    AssignmentMask mask;
    mask.n = params.n;
    mask.k = params.k;
    mask.cells.assign(params.n * params.k, 0);
    for (std::size_t j = 0; j < params.k; ++j)
        for (std::size_t t = 0; t < params.d; ++t)
            mask.cells[((j * params.d + t) % params.n) * params.k + j] = 1;
    return mask;
}

CodingScheme build_scheme(const CodingParams& params, const AssignmentMask& mask) {
    if (mask.n != params.n || mask.k != params.k)
        throw ArityError("build_scheme: mask shape does not match params");
    for (std::size_t j = 0; j < params.k; ++j) {
        if (mask.column_support(j).size() != params.d)
            throw InvalidInputError("build_scheme: mask column " + std::to_string(j) +
                                    " does not have d ones");
    }
    for (std::size_t i = 0; i < params.n; ++i) {
        if (mask.row_support(i).size() != params.w_supp)
            throw InvalidInputError("build_scheme: mask row " + std::to_string(i) +
                                    " does not have w ones");
    }

    CodingScheme scheme;
    scheme.params = params;
    scheme.mask = mask;
    scheme.eval_points.resize(params.n);
    for (std::size_t i = 0; i < params.n; ++i) scheme.eval_points[i] = root_power(params.n, i);

    std::vector<LComplex> points(params.n);
    for (std::size_t i = 0; i < params.n; ++i) points[i] = root_power_l(params.n, i);

    scheme.B = CMat(params.n, params.k);
    scheme.T = CMat(params.f, params.k);
    scheme.B_ext.assign(params.n * params.k, LComplex{0.0L, 0.0L});
    for (std::size_t j = 0; j < params.k; ++j) {
        std::vector<std::size_t> zeros;
        zeros.reserve(params.n - params.d);
        for (std::size_t i = 0; i < params.n; ++i)
            if (!mask.at(i, j)) zeros.push_back(i);

        // coefficients of prod (x - a_z), low order first
        std::vector<LComplex> coeff{LComplex{1.0L, 0.0L}};
        for (std::size_t z : zeros) {
            const LComplex az = points[z];
            coeff.push_back(LComplex{0.0L, 0.0L});
            for (std::size_t t = coeff.size(); t-- > 1;) coeff[t] = coeff[t - 1] - az * coeff[t];
            coeff[0] = -az * coeff[0];
        }
        const LComplex denom = coeff[0];  // prod(-a_z) = numerator at x = 0, unit modulus
        for (std::size_t t = 0; t < coeff.size(); ++t) {
            const LComplex c = coeff[t] / denom;
            scheme.T(t, j) = Complex{static_cast<double>(c.real()), static_cast<double>(c.imag())};
        }
        scheme.T(0, j) = Complex{1.0, 0.0};  // mathematically exact constant term

        for (std::size_t i = 0; i < params.n; ++i) {
            if (!mask.at(i, j)) continue;  // true zero on the complement
            LComplex num{1.0L, 0.0L};
            for (std::size_t z : zeros) num *= points[i] - points[z];
            const LComplex b = num / denom;
            scheme.B_ext[i * params.k + j] = b;
            scheme.B(i, j) = Complex{static_cast<double>(b.real()), static_cast<double>(b.imag())};
        }
    }
    return scheme;
}

DecodeVectorExt decode_vector_ext(const CodingScheme& scheme,
                                  std::span<const std::size_t> responders) {
    const std::size_t f = scheme.params.f;
    const std::size_t n = scheme.params.n;
    if (responders.size() != f) {
        throw ArityError("decode_vector: responder set size " + std::to_string(responders.size()) +
                         " != f = " + std::to_string(f));
    }
    std::vector<std::size_t> sorted(responders.begin(), responders.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >= n) throw InvalidInputError("decode_vector: responder index out of range");
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw InvalidInputError("decode_vector: duplicate responder index");
    }

    std::vector<LComplex> nodes(f);
    for (std::size_t i = 0; i < f; ++i) nodes[i] = root_power_l(n, responders[i]);

    // Route 1: Lagrange closed form for the first row of G_I^{-1}:
    // a_i = prod_{j != i} a_j / (a_j - a_i), the constant coefficient of the
    // i-th Lagrange basis polynomial.
    std::vector<LComplex> a_closed(f);
    for (std::size_t i = 0; i < f; ++i) {
        LComplex prod{1.0L, 0.0L};
        for (std::size_t j = 0; j < f; ++j) {
            if (j == i) continue;
            prod *= nodes[j] / (nodes[j] - nodes[i]);
        }
        a_closed[i] = prod;
    }

    // Route 2: elimination on G_I^T a = e_1 with exact-angle powers.
    std::vector<LComplex> git(f * f);
    for (std::size_t t = 0; t < f; ++t)
        for (std::size_t i = 0; i < f; ++i) git[t * f + i] = root_power_l(n, responders[i] * t);
    std::vector<LComplex> e1(f, LComplex{0.0L, 0.0L});
    e1[0] = LComplex{1.0L, 0.0L};
    const std::vector<LComplex> a_elim = solve_complex(git, e1);

    const auto residual_of = [&](const std::vector<LComplex>& a) {
        long double worst = 0.0L;
        for (std::size_t t = 0; t < f; ++t) {
            LComplex acc{0.0L, 0.0L};
            for (std::size_t i = 0; i < f; ++i) acc += a[i] * git[t * f + i];
            if (t == 0) acc -= LComplex{1.0L, 0.0L};
            worst = std::max(worst, std::abs(acc));
        }
        return static_cast<double>(worst);
    };

    const double res_closed = residual_of(a_closed);
    const double res_elim = residual_of(a_elim);

    long double scale = 0.0L;
    long double disagreement = 0.0L;
    for (std::size_t i = 0; i < f; ++i) {
        scale = std::max(scale, std::abs(a_elim[i]));
        disagreement = std::max(disagreement, std::abs(a_closed[i] - a_elim[i]));
    }

    DecodeVectorExt out;
    out.a = res_closed <= res_elim ? std::move(a_closed) : std::move(a_elim);
    out.residual = std::min(res_closed, res_elim);
    out.conditioning_warning =
        out.residual > 1e-6 || static_cast<double>(disagreement) > 1e-8 * (1.0 + scale);
    return out;
}

DecodeVector decode_vector(const CodingScheme& scheme, std::span<const std::size_t> responders) {
    DecodeVectorExt ext = decode_vector_ext(scheme, responders);
    DecodeVector out;
    out.a.resize(ext.a.size());
    for (std::size_t i = 0; i < ext.a.size(); ++i)
        out.a[i] = Complex{static_cast<double>(ext.a[i].real()),
                           static_cast<double>(ext.a[i].imag())};
    out.residual = ext.residual;
    out.conditioning_warning = ext.conditioning_warning;
    return out;
}

CMat weight_scheme(const CodingScheme& scheme, std::span<const Complex> wvec) {
    if (wvec.size() != scheme.params.k)
        throw ArityError("weight_scheme: weight vector length != k");
    CMat bt = scheme.B;
    for (std::size_t i = 0; i < bt.rows(); ++i)
        for (std::size_t j = 0; j < bt.cols(); ++j) bt(i, j) *= wvec[j];
    return bt;
}

CMat weight_scheme(const CodingScheme& scheme, std::span<const double> wvec) {
    CVec w(wvec.size());
    for (std::size_t j = 0; j < wvec.size(); ++j) w[j] = Complex{wvec[j], 0.0};
    return weight_scheme(scheme, std::span<const Complex>{w});
}

}  // namespace levcode
