#include "levcode/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace levcode {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffDiagTol = 1e-12;  // relative to the two column norms

}  // namespace

SvdResult reduced_svd(const Mat& x) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (p < 1 || n < p) throw InvalidInputError("reduced_svd: need rows >= cols >= 1");
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw InvalidInputError("reduced_svd: non-finite input entry");
    }

    // Column-major working copy; Jacobi rotates column pairs in place.
    Vec a(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) a[j * n + i] = x(i, j);

    Vec v(p * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) v[j * p + j] = 1.0;

    bool converged = (p == 1);
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        // Fresh column norms each sweep; incremental updates would drift.
        Vec sq(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = a.data() + j * n;
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += col[i] * col[i];
            sq[j] = s;
        }

        bool rotated = false;
        for (std::size_t j = 0; j + 1 < p; ++j) {
            for (std::size_t l = j + 1; l < p; ++l) {
                double* cj = a.data() + j * n;
                double* cl = a.data() + l * n;
                double gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) gamma += cj[i] * cl[i];
                if (gamma == 0.0) continue;
                if (std::abs(gamma) <= kOffDiagTol * std::sqrt(sq[j] * sq[l])) continue;

                const double zeta = (sq[l] - sq[j]) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aj = cj[i], al = cl[i];
                    cj[i] = c * aj - s * al;
                    cl[i] = s * aj + c * al;
                }
                double* vj = v.data() + j * p;
                double* vl = v.data() + l * p;
                for (std::size_t i = 0; i < p; ++i) {
                    const double wj = vj[i], wl = vl[i];
                    vj[i] = c * wj - s * wl;
                    vl[i] = s * wj + c * wl;
                }
                // norms transform exactly under the rotation
                const double new_j = c * c * sq[j] - 2.0 * c * s * gamma + s * s * sq[l];
                const double new_l = s * s * sq[j] + 2.0 * c * s * gamma + c * c * sq[l];
                sq[j] = new_j;
                sq[l] = new_l;
                rotated = true;
            }
        }
        if (!rotated) converged = true;
    }
    if (!converged) {
        throw NumericalFailureError("reduced_svd: Jacobi did not converge in " +
                                    std::to_string(kMaxSweeps) + " sweeps");
    }

    Vec sigma(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double* col = a.data() + j * n;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += col[i] * col[i];
        sigma[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out;
    out.U = Mat(n, p);
    out.V = Mat(p, p);
    out.sigma.resize(p);
    std::vector<std::size_t> zero_cols;
    for (std::size_t t = 0; t < p; ++t) {
        const std::size_t j = order[t];
        out.sigma[t] = sigma[j];
        for (std::size_t i = 0; i < p; ++i) out.V(i, t) = v[j * p + i];
        if (sigma[j] > 0.0) {
            const double inv = 1.0 / sigma[j];
            const double* col = a.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) out.U(i, t) = col[i] * inv;
        } else {
            zero_cols.push_back(t);
        }
    }

    // Exactly-zero singular values (zero input columns): fill U with an
    // orthonormal completion so U keeps orthonormal columns.
    for (std::size_t t : zero_cols) {
        for (std::size_t basis = 0; basis < n; ++basis) {
            Vec w(n, 0.0);
            w[basis] = 1.0;
            // project out every filled column; unfilled ones are still zero
            for (std::size_t c = 0; c < p; ++c) {
                double proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += out.U(i, c) * w[i];
                if (proj != 0.0)
                    for (std::size_t i = 0; i < n; ++i) w[i] -= proj * out.U(i, c);
            }
            const double nw = norm2(w);
            if (nw > 0.5) {
                for (std::size_t i = 0; i < n; ++i) out.U(i, t) = w[i] / nw;
                break;
            }
        }
    }
    return out;
}

std::size_t numerical_rank(const Vec& sigma, double rel_tol) {
    if (sigma.empty() || sigma[0] <= 0.0) return 0;
    const double cutoff = rel_tol * sigma[0];
    std::size_t rank = 0;
    for (double s : sigma)
        if (s > cutoff) ++rank;
    return rank;
}

Vec pinv_solve(const SvdResult& svd, std::span<const double> b, double rel_tol) {
    if (b.size() != svd.U.rows()) throw ArityError("pinv_solve: rhs length != rows");
    const std::size_t p = svd.sigma.size();
    const std::size_t rank = numerical_rank(svd.sigma, rel_tol);
    Vec t = matvec_transposed(svd.U, b);
    for (std::size_t i = 0; i < p; ++i) t[i] = (i < rank) ? t[i] / svd.sigma[i] : 0.0;
    return matvec(svd.V, t);
}

}  // namespace levcode
