#pragma once

#include <cstdint>
#include <vector>

#include "cqkit/kernels.hpp"
#include "cqkit/polynomial.hpp"

namespace cqkit {

/// Double-precision copy of a Polynomial laid out for the batch kernels.
/// Single-point evaluation follows the kernels' canonical operation order,
/// so batch and pointwise values are bit-identical.
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const Polynomial& poly);

    std::size_t dimension() const noexcept { return dim_; }
    bool is_zero() const noexcept { return coef_.empty(); }
    double operator()(const double* x) const;
    /// Forward error bound of operator() at x (sum of |term| times a
    /// degree-dependent multiple of the unit roundoff).
    double error_bound(const double* x) const;
    kernels::PolyView view() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> coef_;
    std::vector<std::uint32_t> exps_;
    std::uint32_t max_exp_ = 0;
    std::uint32_t max_degree_ = 0;
};

}  // namespace cqkit
