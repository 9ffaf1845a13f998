#include "cqkit/compiled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cqkit {

CompiledPoly::CompiledPoly(const Polynomial& poly) : dim_(poly.dimension()) {
    coef_.reserve(poly.terms().size());
    exps_.reserve(poly.terms().size() * dim_);
    for (const auto& [exps, c] : poly.terms()) {
        coef_.push_back(to_double(c));
        std::uint32_t deg = 0;
        for (std::uint32_t e : exps) {
            exps_.push_back(e);
            max_exp_ = std::max(max_exp_, e);
            deg += e;
        }
        max_degree_ = std::max(max_degree_, deg);
    }
}

double CompiledPoly::operator()(const double* x) const {
    double sum = 0.0;
    for (std::size_t t = 0; t < coef_.size(); ++t) {
        double term = coef_[t];
        const std::uint32_t* e = exps_.data() + t * dim_;
        for (std::size_t i = 0; i < dim_; ++i) {
            if (e[i] != 0) {
                double p = 1.0;
                for (std::uint32_t k = 0; k < e[i]; ++k) {
                    p *= x[i];
                }
                term *= p;
            }
        }
        sum += term;
    }
    return sum;
}

double CompiledPoly::error_bound(const double* x) const {
    double mag = 0.0;
    for (std::size_t t = 0; t < coef_.size(); ++t) {
        double term = std::fabs(coef_[t]);
        const std::uint32_t* e = exps_.data() + t * dim_;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::uint32_t k = 0; k < e[i]; ++k) {
                term *= std::fabs(x[i]);
            }
        }
        mag += term;
    }
    const double n = static_cast<double>(coef_.size() + max_degree_ + 2);
    return 2.0 * n * 0x1.0p-53 * mag + std::numeric_limits<double>::denorm_min();
}

kernels::PolyView CompiledPoly::view() const {
    return kernels::PolyView{dim_, coef_.size(), coef_.data(), exps_.data(), max_exp_};
}

}  // namespace cqkit
