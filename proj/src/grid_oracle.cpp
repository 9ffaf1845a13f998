#include "cqkit/grid_oracle.hpp"

#include <cmath>
#include <limits>

#include "cqkit/compiled.hpp"
#include "cqkit/errors.hpp"

namespace cqkit {

GridOracle::GridOracle(const MomentModel& model, double step, const kernels::KernelSet& ks)
    : model_(&model), ks_(&ks) {
    if (model.dim() != 2) {
        throw DimensionError("grid oracle is planar");
    }
    const double lo0 = model.lower()[0], hi0 = model.upper()[0];
    const double lo1 = model.lower()[1], hi1 = model.upper()[1];
    n_ = static_cast<std::size_t>(std::llround(std::max(hi0 - lo0, hi1 - lo1) / step));
    const std::size_t m = n_ + 1;
    xs_.resize(m);
    ys_.resize(m);
    const double nn = static_cast<double>(n_);
    for (std::size_t i = 0; i < m; ++i) {
        const double a = static_cast<double>(i);
        xs_[i] = (lo0 * (nn - a) + hi0 * a) / nn;
        ys_[i] = (lo1 * (nn - a) + hi1 * a) / nn;
    }
    const double h = std::max(xs_[1] - xs_[0], ys_[1] - ys_[0]);

    std::vector<CompiledPoly> ineq, eq, eq_d0, eq_d1;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        if (model.is_equality(j)) {
            eq.emplace_back(model.constraint(j));
            eq_d0.emplace_back(model.gradient(j)[0]);
            eq_d1.emplace_back(model.gradient(j)[1]);
        } else {
            ineq.emplace_back(model.constraint(j));
        }
    }

    mask_.assign(m * m, 0);
    std::vector<double> col0(m), val(m), g0(m), g1(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(col0.begin(), col0.end(), xs_[i]);
        const double* coords[] = {col0.data(), ys_.data()};
        std::uint8_t* row = mask_.data() + i * m;
        std::fill(row, row + m, 1);
        for (const auto& c : ineq) {
            ks.eval_poly(c.view(), coords, m, val.data());
            for (std::size_t j = 0; j < m; ++j) {
                if (!(val[j] <= 0.0)) {
                    row[j] = 0;
                }
            }
        }
        for (std::size_t e = 0; e < eq.size(); ++e) {
            ks.eval_poly(eq[e].view(), coords, m, val.data());
            ks.eval_poly(eq_d0[e].view(), coords, m, g0.data());
            ks.eval_poly(eq_d1[e].view(), coords, m, g1.data());
            for (std::size_t j = 0; j < m; ++j) {
                if (!(std::fabs(val[j]) <= std::hypot(g0[j], g1[j]) * h)) {
                    row[j] = 0;
                }
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!feasible(i, j)) {
                continue;
            }
            ++feasible_count_;
            const bool edge = i == 0 || j == 0 || i == n_ || j == n_ || !feasible(i - 1, j) || !feasible(i + 1, j) ||
                              !feasible(i, j - 1) || !feasible(i, j + 1);
            if (edge) {
                bx_.push_back(xs_[i]);
                by_.push_back(ys_[j]);
            }
        }
    }
}

Vec GridOracle::point(std::size_t i, std::size_t j) const {
    Vec v(2);
    v << xs_[i], ys_[j];
    return v;
}

double GridOracle::distance(const Vec& q) const {
    if (bx_.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    if (is_feasible(*model_, q, 0.0)) {
        return 0.0;
    }
    const double* coords[] = {bx_.data(), by_.data()};
    const double query[] = {q[0], q[1]};
    double sq = 0.0;
    ks_->argmin_sq_dist(coords, 2, bx_.size(), query, &sq);
    return std::sqrt(sq);
}

std::vector<Vec> GridOracle::argmax(const Vec& p, double tol) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bx_.size(); ++k) {
        best = std::max(best, p[0] * bx_[k] + p[1] * by_[k]);
    }
    std::vector<Vec> out;
    for (std::size_t k = 0; k < bx_.size(); ++k) {
        if (p[0] * bx_[k] + p[1] * by_[k] >= best - tol) {
            Vec v(2);
            v << bx_[k], by_[k];
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace cqkit
