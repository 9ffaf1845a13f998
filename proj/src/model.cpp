#include "cqkit/model.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>

#include "cqkit/errors.hpp"
#include "cqkit/sampling.hpp"

namespace cqkit {

MomentModel::MomentModel(std::size_t dim, std::vector<Rational> lower, std::vector<Rational> upper,
                         std::vector<Polynomial> inequalities, std::vector<Polynomial> equalities,
                         std::optional<std::vector<Rational>> direction)
    : dim_(dim),
      lower_q_(std::move(lower)),
      upper_q_(std::move(upper)),
      ineq_(std::move(inequalities)),
      eq_(std::move(equalities)),
      direction_(std::move(direction)) {
    if (dim_ == 0) {
        throw DimensionError("model dimension must be positive");
    }
    if (lower_q_.size() != dim_ || upper_q_.size() != dim_) {
        throw DimensionError("box bounds must have one entry per parameter");
    }
    if (ineq_.empty() && eq_.empty()) {
        throw ValidationError("model has no constraints");
    }
    lower_.resize(dim_);
    upper_.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        if (!(lower_q_[i] < upper_q_[i])) {
            throw ValidationError("box lower bound must be below upper bound");
        }
        lower_[i] = to_double(lower_q_[i]);
        upper_[i] = to_double(upper_q_[i]);
    }
    if (direction_) {
        if (direction_->size() != dim_) {
            throw DimensionError("direction length differs from model dimension");
        }
        if (std::all_of(direction_->begin(), direction_->end(), [](const Rational& q) { return sgn(q) == 0; })) {
            throw ValidationError("direction must be nonzero");
        }
    }

    const std::size_t J = num_constraints();
    grads_.reserve(J);
    compiled_.reserve(J);
    compiled_grads_.reserve(J);
    compiled_hess_.reserve(J);
    for (std::size_t j = 0; j < J; ++j) {
        const Polynomial& c = constraint(j);
        if (c.dimension() != dim_) {
            throw DimensionError("constraint dimension differs from model dimension");
        }
        grads_.push_back(c.gradient());
        compiled_.emplace_back(c);
        std::vector<CompiledPoly> cg;
        std::vector<CompiledPoly> ch;
        for (std::size_t i = 0; i < dim_; ++i) {
            cg.emplace_back(grads_[j][i]);
            for (std::size_t k = i; k < dim_; ++k) {
                ch.emplace_back(grads_[j][i].derivative(k));
            }
        }
        compiled_grads_.push_back(std::move(cg));
        compiled_hess_.push_back(std::move(ch));
    }
}

const Polynomial& MomentModel::constraint(std::size_t j) const {
    if (j < ineq_.size()) {
        return ineq_[j];
    }
    return eq_.at(j - ineq_.size());
}

std::optional<Vec> MomentModel::default_direction() const {
    if (!direction_) {
        return std::nullopt;
    }
    Vec p(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        p[i] = to_double((*direction_)[i]);
    }
    return Vec(p / p.norm());
}

double MomentModel::value_certified(std::size_t j, const Vec& x) const {
    const double v = compiled_[j](x.data());
    if (std::fabs(v) > compiled_[j].error_bound(x.data())) {
        return v;
    }
    std::vector<Rational> exact;
    exact.reserve(dim_);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        exact.push_back(from_double(x[i]));
    }
    return to_double(constraint(j).evaluate_exact(exact));
}

Vec MomentModel::values(const Vec& x) const {
    Vec out(num_constraints());
    for (std::size_t j = 0; j < num_constraints(); ++j) {
        out[j] = compiled_[j](x.data());
    }
    return out;
}

Mat MomentModel::jacobian(const Vec& x) const {
    Mat out(num_constraints(), dim_);
    for (std::size_t j = 0; j < num_constraints(); ++j) {
        for (std::size_t i = 0; i < dim_; ++i) {
            out(j, i) = compiled_grads_[j][i](x.data());
        }
    }
    return out;
}

Mat MomentModel::hessian(std::size_t j, const Vec& x) const {
    Mat out(dim_, dim_);
    std::size_t at = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = i; k < dim_; ++k) {
            const double v = compiled_hess_[j][at++](x.data());
            out(i, k) = v;
            out(k, i) = v;
        }
    }
    return out;
}

double MomentModel::criterion_raw(const Vec& x) const {
    double best = 0.0;
    for (std::size_t j = 0; j < ineq_.size(); ++j) {
        best = std::max(best, compiled_[j](x.data()));
    }
    for (std::size_t j = ineq_.size(); j < num_constraints(); ++j) {
        best = std::max(best, std::fabs(compiled_[j](x.data())));
    }
    return best;
}

void MomentModel::criterion_batch(const double* const* coords, std::size_t n, double* out) const {
    const kernels::KernelSet& ks = kernels::active();
    const std::size_t J = num_constraints();
    std::vector<double> buf(J * n);
    std::vector<const double*> rows(J);
    for (std::size_t j = 0; j < J; ++j) {
        ks.eval_poly(compiled_[j].view(), coords, n, buf.data() + j * n);
        rows[j] = buf.data() + j * n;
    }
    ks.criterion_combine(rows.data(), ineq_.size(), rows.data() + ineq_.size(), eq_.size(), n, out);
}

bool MomentModel::in_box(const Vec& x) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) {
            return false;
        }
    }
    return true;
}

Vec MomentModel::clamp(const Vec& x) const {
    return x.cwiseMax(lower_).cwiseMin(upper_);
}

double MomentModel::box_distance(const Vec& x) const {
    return std::min((x - lower_).minCoeff(), (upper_ - x).minCoeff());
}

bool MomentModel::operator==(const MomentModel& other) const {
    return dim_ == other.dim_ && lower_q_ == other.lower_q_ && upper_q_ == other.upper_q_ && ineq_ == other.ineq_ &&
           eq_ == other.eq_ && direction_ == other.direction_;
}

std::vector<std::size_t> ActiveSet::all() const {
    std::vector<std::size_t> out = active_inequalities;
    out.insert(out.end(), active_equalities.begin(), active_equalities.end());
    return out;
}

double criterion(const MomentModel& model, const Vec& theta) {
    if (static_cast<std::size_t>(theta.size()) != model.dim()) {
        throw DimensionError("point dimension differs from model dimension");
    }
    if (!model.in_box(theta)) {
        throw OutOfBox("point lies outside the parameter box");
    }
    return model.criterion_raw(theta);
}

Rational criterion_exact(const MomentModel& model, std::span<const Rational> theta) {
    if (theta.size() != model.dim()) {
        throw DimensionError("point dimension differs from model dimension");
    }
    Rational best = 0;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        Rational v = model.constraint(j).evaluate_exact(theta);
        if (model.is_equality(j)) {
            v = abs(v);
        }
        if (v > best) {
            best = v;
        }
    }
    return best;
}

bool is_feasible(const MomentModel& model, const Vec& theta, double tol) {
    if (static_cast<std::size_t>(theta.size()) != model.dim()) {
        throw DimensionError("point dimension differs from model dimension");
    }
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        const double v = model.value(j, theta);
        if (model.is_equality(j) ? !(std::fabs(v) <= tol) : !(v <= tol)) {
            return false;
        }
    }
    return true;
}

bool is_feasible_strict(const MomentModel& model, const Vec& theta, const Config& cfg) {
    if (!model.in_box(theta)) {
        return false;
    }
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        const double v = model.is_equality(j) ? model.value(j, theta) : model.value_certified(j, theta);
        if (model.is_equality(j) ? !(std::fabs(v) <= cfg.eq_feas_tol) : !(v <= 0.0)) {
            return false;
        }
    }
    return true;
}

ActiveSet active_set(const MomentModel& model, const Vec& theta, double tol_active) {
    if (!is_feasible(model, theta, tol_active)) {
        throw InfeasiblePoint("active set requested at an infeasible point");
    }
    ActiveSet out;
    out.point = theta;
    out.tolerance = tol_active;
    for (std::size_t j = 0; j < model.num_ineq(); ++j) {
        if (model.value(j, theta) >= -tol_active) {
            out.active_inequalities.push_back(j);
        }
    }
    for (std::size_t j = model.num_ineq(); j < model.num_constraints(); ++j) {
        out.active_equalities.push_back(j);
    }
    return out;
}

namespace detail {

double violation(const MomentModel& model, const Vec& x, const Config& cfg) {
    double v = 0.0;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        const double g = model.is_equality(j) ? model.value(j, x) : model.value_certified(j, x);
        if (model.is_equality(j)) {
            v += std::max(0.0, std::fabs(g) - cfg.eq_feas_tol);
        } else {
            v += std::max(0.0, g);
        }
    }
    return v;
}

namespace {

// Minimum-norm d with Aeq d = beq and Ain d <= bin, by enumerating which
// inequality rows are tight. Only for a handful of rows.
std::optional<Vec> min_norm_step(const Mat& Aeq, const Vec& beq, const Mat& Ain, const Vec& bin) {
    const auto m = static_cast<std::size_t>(Ain.rows());
    const auto d = Ain.cols() > 0 ? Ain.cols() : Aeq.cols();
    if (m > 10) {
        return std::nullopt;
    }
    std::optional<Vec> best;
    double best_norm = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        const auto k = static_cast<Eigen::Index>(std::popcount(mask));
        Mat A(Aeq.rows() + k, d);
        Vec b(Aeq.rows() + k);
        A.topRows(Aeq.rows()) = Aeq;
        b.head(Aeq.rows()) = beq;
        Eigen::Index at = Aeq.rows();
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) {
                A.row(at) = Ain.row(static_cast<Eigen::Index>(i));
                b[at++] = bin[static_cast<Eigen::Index>(i)];
            }
        }
        if (A.rows() > d) {
            continue;
        }
        Vec step = Vec::Zero(d);
        if (A.rows() > 0) {
            const Eigen::LDLT<Mat> gram(A * A.transpose());
            step = A.transpose() * gram.solve(b);
            if (gram.info() != Eigen::Success || !step.allFinite() || (A * step - b).norm() > 1e-9 * (1.0 + b.norm())) {
                step = Eigen::CompleteOrthogonalDecomposition<Mat>(A).solve(b);
            }
        }
        if (!step.allFinite() || (A.rows() > 0 && (A * step - b).norm() > 1e-9 * (1.0 + b.norm()))) {
            continue;
        }
        const double n = step.norm();
        if (n >= best_norm) {
            continue;
        }
        bool ok = true;
        for (Eigen::Index i = 0; i < Ain.rows() && ok; ++i) {
            ok = Ain.row(i).dot(step) <= bin[i] + 1e-12 * (1.0 + std::fabs(bin[i]));
        }
        if (ok) {
            best_norm = n;
            best = std::move(step);
        }
    }
    return best;
}

}  // namespace

std::optional<Vec> restore_feasibility(const MomentModel& model, Vec x, const Config& cfg, bool plain_first) {
    constexpr double kTau = 1e-14;
    constexpr double kMultipliers[] = {2.0, 3.0, 4.0, 0.5, 0.25};
    x = model.clamp(x);
    double current = violation(model, x, cfg);
    const int max_iter = plain_first ? std::max(1, cfg.restore_max_iter / 4) : cfg.restore_max_iter;
    for (int it = 0; it < max_iter; ++it) {
        if (current == 0.0) {
            return x;
        }
        const Vec vals = model.values(x);
        const Mat jac = model.jacobian(x);
        std::vector<std::size_t> rows, eq_rows, in_rows;
        for (std::size_t j = 0; j < model.num_constraints(); ++j) {
            if (model.is_equality(j)) {
                rows.push_back(j);
                eq_rows.push_back(j);
            } else if (vals[j] > 0.0) {
                rows.push_back(j);
                in_rows.push_back(j);
            } else if (vals[j] > -1e-6 * (1.0 + jac.row(j).norm())) {
                in_rows.push_back(j);
            }
        }
        std::vector<Vec> steps;
        for (double tau : {0.0, kTau}) {
            Mat A(rows.size(), model.dim());
            Vec r(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                A.row(k) = jac.row(rows[k]);
                r[k] = vals[rows[k]] + (model.is_equality(rows[k]) ? 0.0 : tau);
            }
            Mat Aeq(eq_rows.size(), model.dim()), Ain(in_rows.size(), model.dim());
            Vec beq(eq_rows.size()), bin(in_rows.size());
            for (std::size_t k = 0; k < eq_rows.size(); ++k) {
                Aeq.row(k) = jac.row(eq_rows[k]);
                beq[k] = -vals[eq_rows[k]];
            }
            for (std::size_t k = 0; k < in_rows.size(); ++k) {
                Ain.row(k) = jac.row(in_rows[k]);
                bin[k] = -vals[in_rows[k]] - tau;
            }
            if (auto qp = min_norm_step(Aeq, beq, Ain, bin)) {
                steps.push_back(std::move(*qp));
            }
            steps.push_back(Eigen::CompleteOrthogonalDecomposition<Mat>(A).solve(-r));
        }

        Vec best = x;
        double best_v = current;
        double best_len = std::numeric_limits<double>::infinity();
        // unit steps first; longer or shorter steps only when they stall
        for (const Vec& step : steps) {
            if (!step.allFinite()) {
                continue;
            }
            Vec cand = model.clamp(x + step);
            const double v = violation(model, cand, cfg);
            if (v < best_v) {
                best_v = v;
                best = std::move(cand);
            }
        }
        if (plain_first && best_v <= 0.5 * current) {
            x = std::move(best);
            current = best_v;
            continue;
        }
        for (double m : kMultipliers) {
            for (const Vec& step : steps) {
                if (!step.allFinite()) {
                    continue;
                }
                Vec cand = model.clamp(x + m * step);
                const double v = violation(model, cand, cfg);
                const double len = (cand - x).norm();
                if (v < best_v || (v == best_v && v < current && len < best_len)) {
                    best_v = v;
                    best_len = len;
                    best = std::move(cand);
                }
            }
        }
        if (!(best_v < current)) {
            return std::nullopt;
        }
        x = std::move(best);
        current = best_v;
    }
    if (current == 0.0) {
        return x;
    }
    return std::nullopt;
}

namespace {

struct PenaltyEval {
    double f = 0.0;
    Vec grad;
    Mat hess;
};

double penalty_value(const MomentModel& model, Objective kind, const Vec& anchor, const Vec& x, double rho) {
    double f = kind == Objective::Projection ? (x - anchor).squaredNorm() : -anchor.dot(x);
    double pen = 0.0;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        const double g = model.value(j, x);
        const double phi = model.is_equality(j) ? g : std::max(0.0, g);
        pen += phi * phi;
    }
    return f + rho * pen;
}

PenaltyEval penalty_eval(const MomentModel& model, Objective kind, const Vec& anchor, const Vec& x, double rho) {
    const std::size_t d = model.dim();
    PenaltyEval e;
    if (kind == Objective::Projection) {
        e.f = (x - anchor).squaredNorm();
        e.grad = 2.0 * (x - anchor);
        e.hess = 2.0 * Mat::Identity(d, d);
    } else {
        e.f = -anchor.dot(x);
        e.grad = -anchor;
        e.hess = Mat::Zero(d, d);
    }
    const Vec vals = model.values(x);
    Mat jac;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        const double g = vals[j];
        const double phi = model.is_equality(j) ? g : std::max(0.0, g);
        if (phi == 0.0) {
            continue;
        }
        if (jac.size() == 0) {
            jac = model.jacobian(x);
        }
        const Vec grad_j = jac.row(j).transpose();
        e.f += rho * phi * phi;
        e.grad += 2.0 * rho * phi * grad_j;
        e.hess += 2.0 * rho * (grad_j * grad_j.transpose() + phi * model.hessian(j, x));
    }
    return e;
}

}  // namespace

Vec penalty_minimize(const MomentModel& model, Objective kind, const Vec& anchor, Vec x, double rho,
                     const Config& cfg) {
    const std::size_t d = model.dim();
    x = model.clamp(x);
    double lambda = 0.0;
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        const PenaltyEval e = penalty_eval(model, kind, anchor, x, rho);
        const double scale = 1.0 + e.hess.cwiseAbs().maxCoeff();
        if (e.grad.lpNorm<Eigen::Infinity>() <= 1e-15 * scale) {
            break;
        }
        bool moved = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            Eigen::LDLT<Mat> ldlt(e.hess + lambda * Mat::Identity(d, d));
            Vec step;
            bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
            if (ok) {
                step = ldlt.solve(-e.grad);
                ok = step.allFinite() && step.dot(e.grad) < 0.0;
            }
            if (ok) {
                Vec cand = model.clamp(x + step);
                const double fc = penalty_value(model, kind, anchor, cand, rho);
                if (fc < e.f) {
                    const double moved_by = (cand - x).lpNorm<Eigen::Infinity>();
                    x = std::move(cand);
                    lambda *= 0.25;
                    moved = moved_by > 1e-16 * (1.0 + x.lpNorm<Eigen::Infinity>());
                    break;
                }
            }
            lambda = lambda == 0.0 ? 1e-12 * scale : lambda * 8.0;
        }
        if (!moved) {
            break;
        }
    }
    return x;
}

}  // namespace detail

namespace {

struct Candidate {
    Vec point;
    double distance;
};

// Pulls a feasible point back along the segment towards an infeasible
// one, keeping the last feasible position.

// Feasible-path descent on the distance to q: moves towards q or along a
// single coordinate of q - x (pattern-search style), restores, and keeps the
// best of these moves.
Vec slide_towards(const MomentModel& model, const Vec& q, Vec x, const Config& cfg) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    double dist = (q - x).norm();
    std::vector<double> alpha(static_cast<std::size_t>(d) + 1, dist);
    for (int it = 0; it < 200 && dist > 0.0; ++it) {
        std::optional<Vec> best;
        double best_d = dist * (1.0 - 1e-12);
        std::size_t best_dir = 0;
        for (Eigen::Index dir = 0; dir <= d; ++dir) {
            Vec move = q - x;
            if (dir > 0) {
                const double c = move[dir - 1];
                move.setZero();
                move[dir - 1] = c;
            }
            const double len = move.norm();
            double& a = alpha[static_cast<std::size_t>(dir)];
            a = std::min(a, len);
            bool found = false;
            while (len > 0.0 && a > 1e-10 * (1.0 + dist) && !found) {
                const Vec trial = x + a * move / len;
                for (bool plain : {true, false}) {
                    if (auto y = detail::restore_feasibility(model, trial, cfg, plain)) {
                        const double dy = (q - *y).norm();
                        if (dy < best_d) {
                            best_d = dy;
                            best = std::move(y);
                            best_dir = static_cast<std::size_t>(dir);
                            found = true;
                        }
                    }
                }
                if (!found) {
                    a *= 0.25;
                }
            }
            if (!found) {
                a = 4e-10 * (1.0 + dist);
            }
        }
        if (!best) {
            break;
        }
        x = std::move(*best);
        const double before = dist;
        dist = (q - x).norm();
        alpha[best_dir] *= 2.0;
        if (before - dist <= 1e-12 * (1.0 + before)) {
            break;
        }
    }
    return x;
}

std::optional<Candidate> project_from(const MomentModel& model, const Vec& q, const Vec& seed, bool continuation,
                                      const Config& cfg) {
    Vec x = seed;
    int kmin = cfg.penalty_kmin;
    if (!continuation) {
        if (auto r = detail::restore_feasibility(model, seed, cfg, false)) {
            x = *r;
        }
        kmin = std::max(cfg.penalty_kmin, cfg.penalty_kmax - 2);
    }
    for (int k = kmin; k <= cfg.penalty_kmax; ++k) {
        x = detail::penalty_minimize(model, detail::Objective::Projection, q, x, std::pow(10.0, k), cfg);
    }
    std::optional<Candidate> out;
    for (bool plain : {true, false}) {
        if (auto restored = detail::restore_feasibility(model, x, cfg, plain)) {
            Vec pulled = detail::pull_back(model, x, *restored, cfg);
            const double dist = (q - pulled).norm();
            if (!out || dist < out->distance) {
                out = Candidate{std::move(pulled), dist};
            }
        }
    }
    return out;
}

}  // namespace

namespace detail {

Vec pull_back(const MomentModel& model, const Vec& infeasible, const Vec& feasible, const Config& cfg) {
    double lo = 0.0;  // fraction of the way from feasible to infeasible, known feasible
    double hi = 1.0;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (is_feasible_strict(model, feasible + mid * (infeasible - feasible), cfg)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Vec out = feasible + lo * (infeasible - feasible);
    return is_feasible_strict(model, out, cfg) ? out : feasible;
}

}  // namespace detail

ProjectionResult distance_to_identified_set(const MomentModel& model, const Vec& theta, const Config& cfg,
                                            const Vec* anchor) {
    if (static_cast<std::size_t>(theta.size()) != model.dim()) {
        throw DimensionError("point dimension differs from model dimension");
    }
    if (!model.in_box(theta)) {
        throw OutOfBox("point lies outside the parameter box");
    }
    ProjectionResult out;
    out.query = theta;
    out.nearest_feasible = theta;
    if (is_feasible_strict(model, theta, cfg)) {
        out.distance = 0.0;
        out.converged = true;
        return out;
    }

    const std::size_t d = model.dim();
    std::vector<Vec> seeds{theta};
    const std::size_t extra = cfg.multistart > 1 ? static_cast<std::size_t>(cfg.multistart - 1) : 0;
    double radius = 0.0;
    if (anchor != nullptr) {
        radius = (theta - *anchor).norm();
        for (const Vec& u : ball_points(extra, d, cfg.seed)) {
            seeds.push_back(model.clamp(theta + radius * u));
        }
    } else {
        const Vec width = model.upper() - model.lower();
        for (const Vec& u : halton_points(extra, d, cfg.seed)) {
            seeds.push_back(model.lower() + width.cwiseProduct(u));
        }
    }

    std::optional<Candidate> best;
    if (anchor != nullptr && is_feasible_strict(model, *anchor, cfg)) {
        best = Candidate{*anchor, radius};
    }
    int used = 0;
    for (const Vec& s : seeds) {
        auto c = project_from(model, theta, s, used == 0, cfg);
        ++used;
        if (c && (!best || c->distance < best->distance)) {
            best = std::move(c);
        }
    }
    out.restarts_used = used;
    if (best && best->distance > 0.0) {
        best->point = slide_towards(model, theta, best->point, cfg);
        best->distance = (theta - best->point).norm();
    }
    if (!best) {
        out.converged = false;
        out.distance = std::numeric_limits<double>::infinity();
        return out;
    }
    out.converged = true;
    out.nearest_feasible = best->point;
    out.distance = best->distance;
    return out;
}

}  // namespace cqkit
