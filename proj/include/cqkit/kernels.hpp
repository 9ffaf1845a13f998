#pragma once

// Batched arithmetic kernels with a scalar reference implementation and an
// AVX2 variant chosen at runtime. Every variant must reproduce the scalar
// results bit for bit: same operation order, no FMA contraction.

#include <cstddef>
#include <cstdint>

namespace cqkit::kernels {

/// Flat polynomial table. Term t has coefficient coef[t] and exponents
/// exps[t*dim .. t*dim+dim). Each term is evaluated as
/// ((coef * x0^e0) * x1^e1) * ..., powers by repeated multiplication, and
/// terms are summed in storage order starting from 0.0.
struct PolyView {
    std::size_t dim = 0;
    std::size_t nterms = 0;
    const double* coef = nullptr;
    const std::uint32_t* exps = nullptr;
    std::uint32_t max_exp = 0;
};

struct KernelSet {
    const char* name;

    /// out[k] = poly(coords[0][k], ..., coords[dim-1][k]) for k < n.
    void (*eval_poly)(const PolyView& poly, const double* const* coords, std::size_t n, double* out);

    /// out[k] = max(0, max_j ineq[j][k], max_j |eq[j][k]|).
    void (*criterion_combine)(const double* const* ineq, std::size_t n_ineq, const double* const* eq,
                              std::size_t n_eq, std::size_t n, double* out);

    /// out[k] = max_j r_j(dirs[.][k]) with r_j(t) = rows_j . t, or |rows_j . t|
    /// when is_eq[j] != 0. Rows are row-major m x d. Empty row set gives -inf.
    void (*row_max)(const double* rows, const std::uint8_t* is_eq, std::size_t m, std::size_t d,
                    const double* const* dirs, std::size_t n, double* out);

    /// Index of the point nearest to query in squared Euclidean distance
    /// (lowest index on ties); n when n == 0. Writes the squared distance.
    std::size_t (*argmin_sq_dist)(const double* const* coords, std::size_t d, std::size_t n, const double* query,
                                  double* min_sq);
};

const KernelSet& scalar();

/// AVX2 kernels, or nullptr when not compiled in or the CPU lacks AVX2.
const KernelSet* avx2();

/// Best available kernel set. CQKIT_SIMD=scalar forces the reference path.
const KernelSet& active();

}  // namespace cqkit::kernels
