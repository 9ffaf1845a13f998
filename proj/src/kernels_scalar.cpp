#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cqkit/kernels.hpp"

namespace cqkit::kernels {

namespace {

void eval_poly_scalar(const PolyView& poly, const double* const* coords, std::size_t n, double* out) {
    const std::size_t d = poly.dim;
    const std::size_t stride = poly.max_exp + 1;
    std::vector<double> pw(d * stride);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            double* row = pw.data() + i * stride;
            row[0] = 1.0;
            for (std::size_t e = 1; e < stride; ++e) {
                row[e] = row[e - 1] * coords[i][k];
            }
        }
        double sum = 0.0;
        for (std::size_t t = 0; t < poly.nterms; ++t) {
            double term = poly.coef[t];
            const std::uint32_t* e = poly.exps + t * d;
            for (std::size_t i = 0; i < d; ++i) {
                if (e[i] != 0) {
                    term *= pw[i * stride + e[i]];
                }
            }
            sum += term;
        }
        out[k] = sum;
    }
}

void criterion_combine_scalar(const double* const* ineq, std::size_t n_ineq, const double* const* eq,
                              std::size_t n_eq, std::size_t n, double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        double best = 0.0;
        for (std::size_t j = 0; j < n_ineq; ++j) {
            best = std::max(best, ineq[j][k]);
        }
        for (std::size_t j = 0; j < n_eq; ++j) {
            best = std::max(best, std::fabs(eq[j][k]));
        }
        out[k] = best;
    }
}

void row_max_scalar(const double* rows, const std::uint8_t* is_eq, std::size_t m, std::size_t d,
                    const double* const* dirs, std::size_t n, double* out) {
    for (std::size_t k = 0; k < n; ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                dot += rows[j * d + i] * dirs[i][k];
            }
            if (is_eq[j] != 0) {
                dot = std::fabs(dot);
            }
            best = std::max(best, dot);
        }
        out[k] = best;
    }
}

std::size_t argmin_sq_dist_scalar(const double* const* coords, std::size_t d, std::size_t n, const double* query,
                                  double* min_sq) {
    std::size_t best_idx = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = coords[i][k] - query[i];
            s += diff * diff;
        }
        if (s < best) {
            best = s;
            best_idx = k;
        }
    }
    *min_sq = best;
    return best_idx;
}

}  // namespace

const KernelSet& scalar() {
    static const KernelSet set{"scalar", eval_poly_scalar, criterion_combine_scalar, row_max_scalar,
                               argmin_sq_dist_scalar};
    return set;
}

}  // namespace cqkit::kernels
