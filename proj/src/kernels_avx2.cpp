// Compiled with -mavx2 (and without -mfma); only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cqkit/kernels.hpp"

namespace cqkit::kernels::detail {

namespace {

constexpr std::size_t kLanes = 4;

void eval_poly_avx2(const PolyView& poly, const double* const* coords, std::size_t n, double* out) {
    const std::size_t d = poly.dim;
    const std::size_t stride = poly.max_exp + 1;
    std::vector<double> pw(d * stride * kLanes);
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        for (std::size_t i = 0; i < d; ++i) {
            double* row = pw.data() + i * stride * kLanes;
            const __m256d x = _mm256_loadu_pd(coords[i] + k);
            __m256d acc = _mm256_set1_pd(1.0);
            _mm256_storeu_pd(row, acc);
            for (std::size_t e = 1; e < stride; ++e) {
                acc = _mm256_mul_pd(acc, x);
                _mm256_storeu_pd(row + e * kLanes, acc);
            }
        }
        __m256d sum = _mm256_setzero_pd();
        for (std::size_t t = 0; t < poly.nterms; ++t) {
            __m256d term = _mm256_set1_pd(poly.coef[t]);
            const std::uint32_t* e = poly.exps + t * d;
            for (std::size_t i = 0; i < d; ++i) {
                if (e[i] != 0) {
                    term = _mm256_mul_pd(term, _mm256_loadu_pd(pw.data() + (i * stride + e[i]) * kLanes));
                }
            }
            sum = _mm256_add_pd(sum, term);
        }
        _mm256_storeu_pd(out + k, sum);
    }
    if (k < n) {
        std::vector<const double*> tail(d);
        for (std::size_t i = 0; i < d; ++i) {
            tail[i] = coords[i] + k;
        }
        scalar().eval_poly(poly, tail.data(), n - k, out + k);
    }
}

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// std::max(a, b) returns a unless a < b; _mm256_max_pd(b, a) returns a when a >= b.
inline __m256d max_like_std(__m256d a, __m256d b) {
    const __m256d lt = _mm256_cmp_pd(a, b, _CMP_LT_OQ);
    return _mm256_blendv_pd(a, b, lt);
}

void criterion_combine_avx2(const double* const* ineq, std::size_t n_ineq, const double* const* eq,
                            std::size_t n_eq, std::size_t n, double* out) {
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        __m256d best = _mm256_setzero_pd();
        for (std::size_t j = 0; j < n_ineq; ++j) {
            best = max_like_std(best, _mm256_loadu_pd(ineq[j] + k));
        }
        for (std::size_t j = 0; j < n_eq; ++j) {
            best = max_like_std(best, abs_pd(_mm256_loadu_pd(eq[j] + k)));
        }
        _mm256_storeu_pd(out + k, best);
    }
    if (k < n) {
        std::vector<const double*> ti(n_ineq), te(n_eq);
        for (std::size_t j = 0; j < n_ineq; ++j) {
            ti[j] = ineq[j] + k;
        }
        for (std::size_t j = 0; j < n_eq; ++j) {
            te[j] = eq[j] + k;
        }
        scalar().criterion_combine(ti.data(), n_ineq, te.data(), n_eq, n - k, out + k);
    }
}

void row_max_avx2(const double* rows, const std::uint8_t* is_eq, std::size_t m, std::size_t d,
                  const double* const* dirs, std::size_t n, double* out) {
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < m; ++j) {
            __m256d dot = _mm256_setzero_pd();
            for (std::size_t i = 0; i < d; ++i) {
                dot = _mm256_add_pd(dot, _mm256_mul_pd(_mm256_set1_pd(rows[j * d + i]), _mm256_loadu_pd(dirs[i] + k)));
            }
            if (is_eq[j] != 0) {
                dot = abs_pd(dot);
            }
            best = max_like_std(best, dot);
        }
        _mm256_storeu_pd(out + k, best);
    }
    if (k < n) {
        std::vector<const double*> tail(d);
        for (std::size_t i = 0; i < d; ++i) {
            tail[i] = dirs[i] + k;
        }
        scalar().row_max(rows, is_eq, m, d, tail.data(), n - k, out + k);
    }
}

std::size_t argmin_sq_dist_avx2(const double* const* coords, std::size_t d, std::size_t n, const double* query,
                                double* min_sq) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d best = _mm256_set1_pd(inf);
    __m256d best_idx = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d step = _mm256_set1_pd(static_cast<double>(kLanes));
    std::size_t k = 0;
    for (; k + kLanes <= n; k += kLanes) {
        __m256d s = _mm256_setzero_pd();
        for (std::size_t i = 0; i < d; ++i) {
            const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(coords[i] + k), _mm256_set1_pd(query[i]));
            s = _mm256_add_pd(s, _mm256_mul_pd(diff, diff));
        }
        const __m256d lt = _mm256_cmp_pd(s, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, s, lt);
        best_idx = _mm256_blendv_pd(best_idx, idx, lt);
        idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double lane_best[kLanes];
    alignas(32) double lane_idx[kLanes];
    _mm256_store_pd(lane_best, best);
    _mm256_store_pd(lane_idx, best_idx);

    double best_val = inf;
    std::size_t best_at = n;
    for (std::size_t l = 0; l < kLanes; ++l) {
        if (lane_idx[l] < 0.0) {
            continue;
        }
        const auto at = static_cast<std::size_t>(lane_idx[l]);
        if (lane_best[l] < best_val || (lane_best[l] == best_val && at < best_at)) {
            best_val = lane_best[l];
            best_at = at;
        }
    }
    for (; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = coords[i][k] - query[i];
            s += diff * diff;
        }
        if (s < best_val) {
            best_val = s;
            best_at = k;
        }
    }
    *min_sq = best_val;
    return best_at;
}

}  // namespace

const KernelSet& avx2_set() {
    static const KernelSet set{"avx2", eval_poly_avx2, criterion_combine_avx2, row_max_avx2, argmin_sq_dist_avx2};
    return set;
}

}  // namespace cqkit::kernels::detail
