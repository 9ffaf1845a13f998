#pragma once

#include <vector>

#include "cqkit/kernels.hpp"
#include "cqkit/model.hpp"

namespace cqkit {

/// Brute-force planar oracle: classifies every point of a regular grid over
/// the box and answers nearest-feasible-point queries. Inequalities must
/// hold exactly; an equality h counts as met when |h| <= |grad h| * step.
class GridOracle {
public:
    GridOracle(const MomentModel& model, double step, const kernels::KernelSet& ks = kernels::active());

    std::size_t cells_per_axis() const noexcept { return n_ + 1; }
    std::size_t feasible_count() const noexcept { return feasible_count_; }
    bool feasible(std::size_t i, std::size_t j) const { return mask_[i * (n_ + 1) + j] != 0; }
    Vec point(std::size_t i, std::size_t j) const;

    /// Distance from q to the nearest feasible grid point (+inf if none).
    double distance(const Vec& q) const;
    /// Feasible grid points maximizing p'theta within tol of the best.
    std::vector<Vec> argmax(const Vec& p, double tol) const;

private:
    const MomentModel* model_;
    const kernels::KernelSet* ks_;
    std::size_t n_;
    std::vector<double> xs_, ys_;
    std::vector<std::uint8_t> mask_;
    std::size_t feasible_count_ = 0;
    // feasible points with an infeasible 4-neighbour (or on the box edge)
    std::vector<double> bx_, by_;
};

}  // namespace cqkit
