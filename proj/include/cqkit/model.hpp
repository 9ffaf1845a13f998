#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cqkit/compiled.hpp"
#include "cqkit/config.hpp"
#include "cqkit/polynomial.hpp"

namespace cqkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Moment (in)equality model over a box. Constraint j < num_ineq() is
/// mu_j(theta) <= 0; the rest are mu_j(theta) = 0.
class MomentModel {
public:
    MomentModel(std::size_t dim, std::vector<Rational> lower, std::vector<Rational> upper,
                std::vector<Polynomial> inequalities, std::vector<Polynomial> equalities,
                std::optional<std::vector<Rational>> direction = std::nullopt);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t num_ineq() const noexcept { return ineq_.size(); }
    std::size_t num_eq() const noexcept { return eq_.size(); }
    std::size_t num_constraints() const noexcept { return ineq_.size() + eq_.size(); }
    bool is_equality(std::size_t j) const noexcept { return j >= ineq_.size(); }

    const std::vector<Polynomial>& inequalities() const noexcept { return ineq_; }
    const std::vector<Polynomial>& equalities() const noexcept { return eq_; }
    const Polynomial& constraint(std::size_t j) const;
    const std::vector<Polynomial>& gradient(std::size_t j) const { return grads_.at(j); }

    const std::vector<Rational>& lower_exact() const noexcept { return lower_q_; }
    const std::vector<Rational>& upper_exact() const noexcept { return upper_q_; }
    const Vec& lower() const noexcept { return lower_; }
    const Vec& upper() const noexcept { return upper_; }
    const std::optional<std::vector<Rational>>& direction_exact() const noexcept { return direction_; }
    /// Unit-normalized DSL direction, if declared.
    std::optional<Vec> default_direction() const;

    double value(std::size_t j, const Vec& x) const { return compiled_[j](x.data()); }
    /// Like value(), but falls back to exact evaluation when the double
    /// result is within its rounding error of zero, so the sign is exact.
    double value_certified(std::size_t j, const Vec& x) const;
    Vec values(const Vec& x) const;
    /// Rows are constraint gradients at x.
    Mat jacobian(const Vec& x) const;
    Mat hessian(std::size_t j, const Vec& x) const;
    /// Criterion without the box check.
    double criterion_raw(const Vec& x) const;
    /// Batched criterion over structure-of-arrays coordinates.
    void criterion_batch(const double* const* coords, std::size_t n, double* out) const;

    bool in_box(const Vec& x) const;
    Vec clamp(const Vec& x) const;
    double box_distance(const Vec& x) const;

    bool operator==(const MomentModel& other) const;

private:
    std::size_t dim_;
    std::vector<Rational> lower_q_, upper_q_;
    Vec lower_, upper_;
    std::vector<Polynomial> ineq_, eq_;
    std::optional<std::vector<Rational>> direction_;
    std::vector<std::vector<Polynomial>> grads_;
    std::vector<CompiledPoly> compiled_;
    std::vector<std::vector<CompiledPoly>> compiled_grads_;
    std::vector<std::vector<CompiledPoly>> compiled_hess_;  // upper triangle, row-major
};

struct ActiveSet {
    Vec point;
    std::vector<std::size_t> active_inequalities;
    std::vector<std::size_t> active_equalities;
    double tolerance = 0.0;

    std::vector<std::size_t> all() const;
};

struct ProjectionResult {
    Vec query;
    Vec nearest_feasible;
    double distance = 0.0;
    bool converged = false;
    int restarts_used = 0;
};

/// max{0, max ineq, max |eq|}; throws OutOfBox outside the box.
double criterion(const MomentModel& model, const Vec& theta);
Rational criterion_exact(const MomentModel& model, std::span<const Rational> theta);
bool is_feasible(const MomentModel& model, const Vec& theta, double tol);
/// Strict numerical feasibility: inequalities <= 0 exactly, |eq| <= eq tolerance.
bool is_feasible_strict(const MomentModel& model, const Vec& theta, const Config& cfg);
/// Throws InfeasiblePoint when theta is not feasible at tol_active.
ActiveSet active_set(const MomentModel& model, const Vec& theta, double tol_active);

/// Multistart penalized projection onto the identified set. When an
/// anchor (known feasible point) is given, restarts are drawn from the
/// ball around the query that reaches the anchor instead of the box.
ProjectionResult distance_to_identified_set(const MomentModel& model, const Vec& theta, const Config& cfg,
                                            const Vec* anchor = nullptr);

namespace detail {

/// Sum of positive inequality parts and excess equality residuals.
double violation(const MomentModel& model, const Vec& x, const Config& cfg);

/// Moves x onto the strictly feasible set by minimum-norm linearized
/// steps; nullopt when it stalls. plain_first prefers undamped unit steps
/// (accurate at cusps); otherwise the step length minimizing the violation
/// is taken (reaches exact zeros of squared constraints).
std::optional<Vec> restore_feasibility(const MomentModel& model, Vec x, const Config& cfg, bool plain_first);

enum class Objective { Projection, Support };

/// Damped Newton on objective + rho * sum of squared violations, clamped to the box.
Vec penalty_minimize(const MomentModel& model, Objective kind, const Vec& anchor, Vec x, double rho,
                     const Config& cfg);

/// Bisects on the segment from a strictly feasible point towards an
/// infeasible one; returns the last strictly feasible point found.
Vec pull_back(const MomentModel& model, const Vec& infeasible, const Vec& feasible, const Config& cfg);

}  // namespace detail

}  // namespace cqkit
