#include "cqkit/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cqkit/errors.hpp"
#include "cqkit/sampling.hpp"

namespace cqkit {

const char* to_string(Multiplicity m) {
    switch (m) {
    case Multiplicity::Singleton:
        return "singleton";
    case Multiplicity::NonSingleton:
        return "non-singleton";
    case Multiplicity::Unresolved:
        return "unresolved";
    }
    return "unresolved";
}

Mat hyperplane_basis(const Vec& p) {
    const auto d = p.size();
    if (d == 2) {
        Mat u(2, 1);
        u << p[1], -p[0];
        return u;
    }
    Eigen::HouseholderQR<Mat> qr(p);
    Mat q = qr.householderQ();
    return q.rightCols(d - 1);
}

namespace {

struct Raw {
    Vec point;
    double value;
};

bool feasible_on_plane(const MomentModel& model, const Vec& x, const Config& cfg) {
    return model.in_box(x) && criterion(model, x) <= cfg.hyperplane_feas_tol;
}

std::vector<Vec> prescan(const MomentModel& model, const Config& cfg) {
    const std::size_t d = model.dim();
    std::vector<std::vector<double>> coords(d);
    std::size_t n = 0;
    if (d <= 3) {
        const std::size_t per = static_cast<std::size_t>(std::max(2, cfg.prescan_per_axis));
        n = 1;
        for (std::size_t i = 0; i < d; ++i) {
            n *= per;
        }
        for (std::size_t i = 0; i < d; ++i) {
            coords[i].resize(n);
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t rest = k;
            for (std::size_t i = 0; i < d; ++i) {
                const double f = static_cast<double>(rest % per) / static_cast<double>(per - 1);
                rest /= per;
                coords[i][k] = model.lower()[i] * (1.0 - f) + model.upper()[i] * f;
            }
        }
    } else {
        const auto pts = halton_points(4000, d, cfg.seed);
        n = pts.size();
        for (std::size_t i = 0; i < d; ++i) {
            coords[i].resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                coords[i][k] = model.lower()[i] + (model.upper()[i] - model.lower()[i]) * pts[k][i];
            }
        }
    }
    std::vector<const double*> ptrs(d);
    for (std::size_t i = 0; i < d; ++i) {
        ptrs[i] = coords[i].data();
    }
    std::vector<double> crit(n);
    model.criterion_batch(ptrs.data(), n, crit.data());
    std::vector<Vec> out;
    for (std::size_t k = 0; k < n; ++k) {
        if (crit[k] > cfg.eq_feas_tol) {
            continue;
        }
        Vec x(d);
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = coords[i][k];
        }
        if (is_feasible_strict(model, x, cfg)) {
            out.push_back(std::move(x));
        }
    }
    return out;
}

// Feasible-path ascent along p and p +- hyperplane directions.
Vec ascend(const MomentModel& model, const Vec& p, Vec x, const Config& cfg) {
    const Mat basis = hyperplane_basis(p);
    std::vector<Vec> dirs{p};
    for (Eigen::Index i = 0; i < basis.cols(); ++i) {
        dirs.push_back((p + basis.col(i)).normalized());
        dirs.push_back((p - basis.col(i)).normalized());
    }
    std::vector<double> alpha(dirs.size(), 1e-2);
    for (int it = 0; it < 200; ++it) {
        std::optional<Vec> best;
        double best_v = p.dot(x);
        std::size_t best_dir = 0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            bool found = false;
            while (alpha[k] > 1e-13 && !found) {
                const Vec trial = model.clamp(x + alpha[k] * dirs[k]);
                for (bool plain : {true, false}) {
                    if (auto y = detail::restore_feasibility(model, trial, cfg, plain)) {
                        const double v = p.dot(*y);
                        if (v > best_v + 1e-15 * (1.0 + std::fabs(best_v))) {
                            best_v = v;
                            best = std::move(y);
                            best_dir = k;
                            found = true;
                        }
                    }
                }
                if (!found) {
                    alpha[k] *= 0.25;
                }
            }
        }
        if (!best) {
            break;
        }
        x = std::move(*best);
        alpha[best_dir] *= 2.0;
    }
    return x;
}

constexpr double kPolishRadius = 0.05;

// Newton on the KKT system p = J' lambda with the constraints in act held at zero.
std::optional<Vec> kkt_newton(const MomentModel& model, const Vec& p, const Vec& x0,
                              const std::vector<std::size_t>& act, const Config& cfg) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    const auto m = static_cast<Eigen::Index>(act.size());
    auto active_jac = [&](const Vec& x) {
        const Mat full = model.jacobian(x);
        Mat j(m, d);
        for (Eigen::Index k = 0; k < m; ++k) {
            j.row(k) = full.row(static_cast<Eigen::Index>(act[k]));
        }
        return j;
    };
    Vec x = x0;
    Vec lambda = active_jac(x).transpose().completeOrthogonalDecomposition().solve(p);
    for (int it = 0; it < 40; ++it) {
        const Mat J = active_jac(x);
        Vec F(d + m);
        F.head(d) = p - J.transpose() * lambda;
        for (Eigen::Index k = 0; k < m; ++k) {
            F[d + k] = model.value(act[k], x);
        }
        if (F.lpNorm<Eigen::Infinity>() <= 1e-15) {
            break;
        }
        Mat K = Mat::Zero(d + m, d + m);
        for (Eigen::Index k = 0; k < m; ++k) {
            K.topLeftCorner(d, d) -= lambda[k] * model.hessian(act[k], x);
        }
        K.topRightCorner(d, m) = -J.transpose();
        K.bottomLeftCorner(m, d) = J;
        const Vec step = K.completeOrthogonalDecomposition().solve(-F);
        if (!step.allFinite()) {
            break;
        }
        x += step.head(d);
        lambda += step.tail(m);
        // Ascent can stall a little way along a flat boundary, so allow some travel.
        if ((x - x0).norm() > kPolishRadius || !model.in_box(x)) {
            return std::nullopt;
        }
    }
    // A KKT point violated only by rounding is kept; the chord back to x0 can
    // leave a nonconvex set.
    if (is_feasible_strict(model, x, cfg) || model.criterion_raw(x) <= cfg.hyperplane_feas_tol) {
        return x;
    }
    Vec y = detail::pull_back(model, x, x0, cfg);
    return is_feasible_strict(model, y, cfg) ? std::optional<Vec>(y) : std::nullopt;
}

// Best KKT refinement over the subsets of the nearly active constraints.
Vec kkt_polish(const MomentModel& model, const Vec& p, const Vec& x0, const Config& cfg) {
    const Vec vals = model.values(x0);
    std::vector<std::size_t> near, eqs;
    for (std::size_t j = 0; j < model.num_constraints(); ++j) {
        if (model.is_equality(j)) {
            eqs.push_back(j);
        } else if (vals[static_cast<Eigen::Index>(j)] >= -1e-4) {
            near.push_back(j);
        }
    }
    std::sort(near.begin(), near.end(), [&](std::size_t a, std::size_t b) {
        return vals[static_cast<Eigen::Index>(a)] > vals[static_cast<Eigen::Index>(b)];
    });
    if (near.size() > 4) {
        near.resize(4);
    }
    Vec best = x0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << near.size()); ++mask) {
        std::vector<std::size_t> act = eqs;
        for (std::size_t k = 0; k < near.size(); ++k) {
            if (mask & (std::size_t{1} << k)) {
                act.push_back(near[k]);
            }
        }
        if (act.empty()) {
            continue;
        }
        if (auto x = kkt_newton(model, p, x0, act, cfg); x && p.dot(*x) > p.dot(best)) {
            best = *x;
        }
    }
    return best;
}

Raw local_max(const MomentModel& model, const Vec& p, const Vec& seed, const Config& cfg) {
    Vec x = seed;
    for (int k = cfg.penalty_kmin; k <= cfg.penalty_kmax; ++k) {
        x = detail::penalty_minimize(model, detail::Objective::Support, p, x, std::pow(10.0, k), cfg);
    }
    Raw out{seed, -std::numeric_limits<double>::infinity()};
    if (is_feasible_strict(model, seed, cfg)) {
        out.value = p.dot(seed);
    }
    if (is_feasible_strict(model, x, cfg)) {
        out = {x, p.dot(x)};
        return out;
    }
    for (bool plain : {true, false}) {
        if (auto r = detail::restore_feasibility(model, x, cfg, plain)) {
            Vec y = detail::pull_back(model, x, *r, cfg);
            if (p.dot(y) > out.value) {
                out = {std::move(y), p.dot(y)};
            }
        }
    }
    return out;
}

double bisect_end(const MomentModel& model, const Vec& base, const Vec& u, double t_in, double t_out,
                  const Config& cfg) {
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (t_in + t_out);
        if (feasible_on_plane(model, base + mid * u, cfg)) {
            t_in = mid;
        } else {
            t_out = mid;
        }
    }
    return t_in;
}

// Pieces of S on the line base + t u (d = 2).
std::vector<SupportPiece> trace_line(const MomentModel& model, const Vec& base, const Vec& u,
                                     const std::vector<Vec>& anchors, const Config& cfg) {
    // t-range where the line stays in the box
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        if (std::fabs(u[i]) < 1e-15) {
            continue;
        }
        double a = (model.lower()[i] - base[i]) / u[i];
        double b = (model.upper()[i] - base[i]) / u[i];
        if (a > b) {
            std::swap(a, b);
        }
        tmin = std::max(tmin, a);
        tmax = std::min(tmax, b);
    }
    struct S {
        double t;
        bool ok;
    };
    std::vector<S> samples;
    const int n = std::max(2, cfg.support_sample);
    for (int k = 0; k < n; ++k) {
        const double t = tmin + (tmax - tmin) * k / (n - 1);
        samples.push_back({t, feasible_on_plane(model, base + t * u, cfg)});
    }
    for (const Vec& a : anchors) {
        samples.push_back({u.dot(a - base), true});
    }
    std::sort(samples.begin(), samples.end(), [](const S& x, const S& y) { return x.t < y.t; });

    std::vector<SupportPiece> pieces;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].ok) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < samples.size() && samples[j + 1].ok) {
            ++j;
        }
        const double lo = i == 0 ? samples[i].t : bisect_end(model, base, u, samples[i].t, samples[i - 1].t, cfg);
        const double hi =
            j + 1 == samples.size() ? samples[j].t : bisect_end(model, base, u, samples[j].t, samples[j + 1].t, cfg);
        pieces.push_back({base + lo * u, base + hi * u});
        i = j + 1;
    }
    return pieces;
}

SupportPoint make_point(const MomentModel& model, const Vec& c, const Config& cfg) {
    SupportPoint sp;
    sp.point = c;
    sp.active = active_set(model, c, cfg.tol_active);
    const Mat jac = model.jacobian(c);
    const auto idx = sp.active.all();
    sp.gradients.resize(static_cast<Eigen::Index>(idx.size()), jac.cols());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        sp.gradients.row(static_cast<Eigen::Index>(k)) = jac.row(static_cast<Eigen::Index>(idx[k]));
    }
    return sp;
}

double segment_distance(const Vec& a, const Vec& b, const Vec& x) {
    const Vec ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) {
        return (x - a).norm();
    }
    const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

}  // namespace

SupportSolution solve_support(const MomentModel& model, const Vec& p_in, const Config& cfg) {
    const std::size_t d = model.dim();
    if (static_cast<std::size_t>(p_in.size()) != d) {
        throw DimensionError("direction length differs from model dimension");
    }
    if (!(p_in.norm() > 0.0) || !p_in.allFinite()) {
        throw ValidationError("direction must be a nonzero finite vector");
    }
    const Vec p = p_in.normalized();

    std::vector<Vec> feasible = prescan(model, cfg);
    std::sort(feasible.begin(), feasible.end(), [&](const Vec& a, const Vec& b) { return p.dot(a) > p.dot(b); });

    std::vector<Vec> seeds{0.5 * (model.lower() + model.upper())};
    const Vec width = model.upper() - model.lower();
    for (const Vec& u : halton_points(static_cast<std::size_t>(std::max(0, cfg.multistart - 1)), d, cfg.seed)) {
        seeds.push_back(model.lower() + width.cwiseProduct(u));
    }
    for (std::size_t k = 0; k < feasible.size() && k < 8; ++k) {
        seeds.push_back(feasible[k]);
    }

    std::vector<Raw> raw;
    for (const Vec& s : seeds) {
        Raw r = local_max(model, p, s, cfg);
        if (std::isfinite(r.value)) {
            raw.push_back(std::move(r));
        }
    }
    if (raw.empty()) {
        throw EmptyIdentifiedSet("no feasible parameter value found; the identified set appears empty");
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.value > b.value; });

    // refine the distinct near-best candidates
    const double coarse = raw.front().value - 1e-3 * (1.0 + std::fabs(raw.front().value));
    std::vector<Raw> refined;
    for (const Raw& r : raw) {
        if (r.value < coarse) {
            break;
        }
        const bool seen = std::any_of(refined.begin(), refined.end(),
                                      [&](const Raw& q) { return (q.point - r.point).norm() <= 1e-3; });
        if (seen) {
            continue;
        }
        Vec x = kkt_polish(model, p, ascend(model, p, r.point, cfg), cfg);
        refined.push_back({x, p.dot(x)});
    }
    std::stable_sort(refined.begin(), refined.end(), [](const Raw& a, const Raw& b) { return a.value > b.value; });

    SupportSolution out;
    out.direction = p;
    out.value = refined.front().value;
    std::vector<Vec> clusters;
    for (const Raw& r : refined) {
        if (r.value < out.value - cfg.value_tol) {
            break;
        }
        const bool near = std::any_of(clusters.begin(), clusters.end(),
                                      [&](const Vec& c) { return (c - r.point).norm() <= cfg.cluster_radius; });
        if (!near) {
            clusters.push_back(r.point);
        }
    }
    for (const Vec& c : clusters) {
        out.points.push_back(make_point(model, c, cfg));
    }

    auto warn_boundary = [&]() {
        for (const auto& sp : out.points) {
            const Vec gap = (sp.point - model.lower()).cwiseMin(model.upper() - sp.point);
            if (gap.minCoeff() <= cfg.boundary_warn) {
                out.warnings.push_back("support point lies within " + std::to_string(cfg.boundary_warn) +
                                       " of the parameter box boundary");
                return;
            }
        }
    };

    // multiplicity
    const Mat basis = hyperplane_basis(p);
    bool extended = clusters.size() > 1;
    for (Eigen::Index i = 0; i < basis.cols() && !extended; ++i) {
        for (double h : {1e-3, 1e-2}) {
            for (double sgn : {1.0, -1.0}) {
                const Vec probe = clusters.front() + sgn * h * basis.col(i);
                extended = extended || feasible_on_plane(model, probe, cfg);
            }
        }
    }
    if (!extended) {
        out.multiplicity = Multiplicity::Singleton;
        out.pieces.push_back({clusters.front(), clusters.front()});
        out.sample = clusters;
        warn_boundary();
        return out;
    }
    if (d == 2) {
        out.pieces = trace_line(model, clusters.front(), basis.col(0), clusters, cfg);
        out.multiplicity = out.pieces.size() == 1 ? Multiplicity::NonSingleton : Multiplicity::Unresolved;
        // representative points: interior endpoints and midpoints of the pieces
        std::vector<Vec> reps;
        for (const auto& piece : out.pieces) {
            for (const Vec& c : {piece.a, piece.b, Vec(0.5 * (piece.a + piece.b))}) {
                const Vec gap = (c - model.lower()).cwiseMin(model.upper() - c);
                if (gap.minCoeff() <= cfg.boundary_warn) {
                    continue;
                }
                const Vec* nearest = &clusters.front();
                for (const Vec& k : clusters) {
                    if ((k - c).norm() < (*nearest - c).norm()) {
                        nearest = &k;
                    }
                }
                // Endpoints found by bisection are kept as is: pulling them back by strict
                // feasibility drifts along constraints that are zero up to rounding.
                Vec x = (*nearest - c).norm() <= 1e-6         ? *nearest
                        : model.criterion_raw(c) <= cfg.eq_feas_tol ? c
                                                                    : detail::pull_back(model, c, *nearest, cfg);
                const bool dup = std::any_of(reps.begin(), reps.end(),
                                             [&](const Vec& r) { return (r - x).norm() <= cfg.cluster_radius; });
                if (!dup) {
                    reps.push_back(std::move(x));
                }
            }
        }
        if (!reps.empty()) {
            out.points.clear();
            for (const Vec& c : reps) {
                out.points.push_back(make_point(model, c, cfg));
            }
        }
        for (const auto& piece : out.pieces) {
            const int n = std::max(2, cfg.support_sample);
            for (int k = 0; k < n; ++k) {
                out.sample.push_back(piece.a + (piece.b - piece.a) * (static_cast<double>(k) / (n - 1)));
            }
        }
        warn_boundary();
        return out;
    }
    out.multiplicity = Multiplicity::NonSingleton;
    out.sample = clusters;
    const double reach = width.norm();
    for (const Vec& u : ball_points(static_cast<std::size_t>(cfg.sphere_samples), d - 1, cfg.seed)) {
        const Vec x = clusters.front() + reach * (basis * u);
        if (feasible_on_plane(model, x, cfg)) {
            out.sample.push_back(x);
        }
    }
    warn_boundary();
    return out;
}

std::optional<double> distance_to_support_set(const SupportSolution& solution, const Vec& theta) {
    if (solution.multiplicity == Multiplicity::Unresolved) {
        return std::nullopt;
    }
    double best = std::numeric_limits<double>::infinity();
    if (!solution.pieces.empty()) {
        for (const auto& piece : solution.pieces) {
            best = std::min(best, segment_distance(piece.a, piece.b, theta));
        }
        return best;
    }
    for (const Vec& s : solution.sample) {
        best = std::min(best, (theta - s).norm());
    }
    return best;
}

}  // namespace cqkit
