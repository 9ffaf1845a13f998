#include "cqkit/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cqkit/cones.hpp"
#include "cqkit/cq.hpp"
#include "cqkit/sampling.hpp"

namespace cqkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json vec_json(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vec unit2(double a) {
    Vec t(2);
    t << std::cos(a), std::sin(a);
    return t;
}

// Shell B(theta, eta_k) \ B(theta, eta_{k+1}): directions times geometric radii.
std::vector<Vec> shell_points(const Vec& theta, const std::vector<Vec>& dirs, int k, std::size_t n) {
    std::vector<Vec> out;
    if (dirs.empty()) {
        return out;
    }
    const std::size_t radii = std::max<std::size_t>(1, n / dirs.size());
    const double eta = std::ldexp(1.0, -k);
    for (std::size_t i = 0; i < radii; ++i) {
        const double r = eta * std::exp2(-static_cast<double>(i) / static_cast<double>(radii));
        for (const Vec& u : dirs) {
            out.push_back(theta + r * u);
        }
    }
    return out;
}

std::vector<Vec> global_directions(const ConeDescription& cone, std::size_t d, const Config& cfg) {
    std::vector<Vec> dirs;
    if (d == 2) {
        const int n = 40;
        for (int i = 0; i < n; ++i) {
            dirs.push_back(unit2(2.0 * std::numbers::pi * i / n));
        }
        // boundary rays of L are where first-order information vanishes
        for (const Vec& r : cone.generator_rays) {
            dirs.push_back(r);
        }
    } else {
        dirs = sphere_points(static_cast<std::size_t>(cfg.shell_points_global / 10), d, cfg.seed);
    }
    return dirs;
}

struct ShellDecision {
    Status status = Status::Inconclusive;
    nlohmann::json evidence;
};

template <class RatioAt>
ShellDecision decide_minorant(const MinorantTrace& tr, const Vec& theta, const Config& cfg, RatioAt ratio_at) {
    ShellDecision out;
    nlohmann::json shells = nlohmann::json::array();
    double min_c = kInf;
    int finite = 0;
    int worst = -1;
    for (std::size_t i = 0; i < tr.shells.size(); ++i) {
        const double c = tr.c_hat[i];
        shells.push_back({{"k", tr.shells[i]}, {"c_hat", std::isfinite(c) ? nlohmann::json(c) : nlohmann::json(nullptr)}});
        if (std::isfinite(c)) {
            ++finite;
            if (c < min_c) {
                min_c = c;
            }
            worst = static_cast<int>(i);
        }
    }
    out.evidence["shells"] = shells;
    out.evidence["samples"] = tr.samples;
    out.evidence["projection_failures"] = tr.projection_failures;
    if (tr.samples > 0 && tr.projection_failures > cfg.projection_failure_max * tr.samples) {
        out.evidence["blocking"] = "projection failures above budget";
        return out;
    }
    if (finite == 0) {
        out.status = Status::Holds;
        out.evidence["vacuous"] = true;
        return out;
    }
    out.evidence["c_hat"] = min_c;
    if (min_c >= cfg.c_floor) {
        out.status = Status::Holds;
        return out;
    }
    const double slope = trend_slope(tr);
    out.evidence["slope"] = std::isnan(slope) ? nlohmann::json(nullptr) : nlohmann::json(slope);
    if (finite < cfg.trend_min_shells || std::isnan(slope) || slope >= cfg.trend_slope) {
        out.evidence["blocking"] = "ratio below floor without a trend to zero";
        return out;
    }
    // line search along the finest-shell minimizer
    const Vec u = (tr.argmin[static_cast<std::size_t>(worst)] - theta).normalized();
    nlohmann::json witness = nlohmann::json::array();
    double prev = kInf, last = kInf;
    bool monotone = true;
    for (int k = cfg.shell_kmax + 1; k <= cfg.shell_kmax + 4; ++k) {
        const Vec x = theta + std::ldexp(1.0, -k) * u;
        const double r = ratio_at(x);
        witness.push_back({{"theta", vec_json(x)}, {"ratio", std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr)}});
        if (!std::isfinite(r) || r > 1.05 * prev) {
            monotone = false;
        }
        prev = r;
        last = r;
    }
    out.evidence["witness_direction"] = vec_json(u);
    out.evidence["witness"] = witness;
    if (monotone && last < cfg.c_floor) {
        out.status = Status::Fails;
    } else {
        out.evidence["blocking"] = "witness line search did not confirm";
    }
    return out;
}

AssumptionVerdict make(Node id, Status s, nlohmann::json ev) {
    AssumptionVerdict v;
    v.id = id;
    v.status = s;
    v.evidence = std::move(ev);
    return v;
}

}  // namespace

double trend_slope(const MinorantTrace& trace) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < trace.shells.size(); ++i) {
        const double c = trace.c_hat[i];
        if (!std::isfinite(c) || c <= 0.0) {
            continue;
        }
        const double x = trace.shells[i], y = std::log(c);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

AssumptionVerdict check_degeneracy(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg) {
    (void)p;
    nlohmann::json ev;
    ev["equalities"] = model.num_eq();
    if (model.num_eq() > 0) {
        return make(Node::A2, Status::Fails, ev);
    }
    const CqVerdict mfcq = check_mfcq(model, theta, cfg);
    ev["mfcq"] = mfcq.evidence;
    if (mfcq.status != Status::Holds) {
        return make(Node::A2, mfcq.status, ev);
    }
    const MfcqProgram prog = mfcq_program(model, theta, cfg);
    if (!prog.bounded) {
        ev["probe"] = "no active inequalities";
        return make(Node::A2, Status::Holds, ev);
    }
    // max_j mu_j(theta + gamma t*) <= -c gamma along the witness
    nlohmann::json probe = nlohmann::json::array();
    std::vector<double> tail;
    for (int k = cfg.tangent_kmin; k <= cfg.tangent_kmax; ++k) {
        const double g = std::ldexp(1.0, -k);
        const Vec x = theta + g * prog.witness;
        if (!model.in_box(x)) {
            continue;
        }
        double m = -kInf;
        for (std::size_t j = 0; j < model.num_ineq(); ++j) {
            m = std::max(m, model.value(j, x));
        }
        const double c = -m / g;
        probe.push_back({{"k", k}, {"c", c}});
        if (k > cfg.tangent_kmax - cfg.persistence) {
            tail.push_back(c);
        }
    }
    ev["probe"] = probe;
    const bool ok = !tail.empty() && *std::min_element(tail.begin(), tail.end()) >= 0.5 * prog.s_star;
    if (!ok) {
        ev["blocking"] = "corroboration probe disagrees with the MFCQ shortcut";
        return make(Node::A2, Status::Inconclusive, ev);
    }
    return make(Node::A2, Status::Holds, ev);
}

AssumptionVerdict check_descent(const MomentModel& model, const Vec& theta, const Config& cfg) {
    nlohmann::json ev;
    ev["equalities"] = model.num_eq();
    if (model.num_eq() > 0) {
        return make(Node::A6, Status::Fails, ev);
    }
    const MfcqProgram prog = mfcq_program(model, theta, cfg);
    ev["witness"] = vec_json(prog.witness);
    if (!prog.bounded) {
        ev["s_star"] = nullptr;
        return make(Node::A6, Status::Holds, ev);
    }
    ev["s_star"] = prog.s_star;
    if (std::isnan(prog.s_star)) {
        return make(Node::A6, Status::Inconclusive, ev);
    }
    if (prog.s_star >= cfg.mfcq_tol) {
        return make(Node::A6, Status::Holds, ev);
    }
    if (prog.s_star <= cfg.zero_tol) {
        return make(Node::A6, Status::Fails, ev);
    }
    return make(Node::A6, Status::Inconclusive, ev);
}

AssumptionVerdict check_minorant_global(const MomentModel& model, const Vec& theta, const Config& cfg) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    const std::vector<Vec> dirs = global_directions(cone, model.dim(), cfg);
    Config proj = cfg;
    proj.multistart = cfg.tangent_multistart;
    const int cap = 12;

    MinorantTrace tr;
    for (int k = cfg.shell_kmin; k <= cfg.shell_kmax; ++k) {
        struct Cand {
            Vec x;
            double crit;
            double ub;
        };
        std::vector<Cand> cands;
        for (const Vec& x : shell_points(theta, dirs, k, static_cast<std::size_t>(cfg.shell_points_global))) {
            if (!model.in_box(x) || is_feasible_strict(model, x, cfg)) {
                continue;
            }
            const double crit = model.criterion_raw(x);
            if (crit <= 0.0) {
                continue;
            }
            double ub = (x - theta).norm();
            if (auto r = detail::restore_feasibility(model, x, cfg, true)) {
                ub = std::min(ub, (*r - x).norm());
            }
            cands.push_back({x, crit, ub});
        }
        tr.shells.push_back(k);
        tr.samples += static_cast<int>(cands.size());
        if (cands.empty()) {
            tr.c_hat.push_back(kInf);
            tr.argmin.emplace_back();
            continue;
        }
        // crit / ub never exceeds the true ratio: refine only the smallest
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.crit / a.ub < b.crit / b.ub; });
        double best = kInf;
        Vec arg = cands.front().x;
        std::size_t i = 0;
        for (; i < cands.size() && static_cast<int>(i) < cap; ++i) {
            const Cand& c = cands[i];
            if (c.crit / c.ub >= best) {
                break;
            }
            const ProjectionResult pr = distance_to_identified_set(model, c.x, proj, &theta);
            if (!pr.converged) {
                ++tr.projection_failures;
            }
            const double dist = pr.converged ? std::min(pr.distance, c.ub) : c.ub;
            const double r = c.crit / dist;
            if (r < best) {
                best = r;
                arg = c.x;
            }
        }
        if (i < cands.size() && static_cast<int>(i) == cap) {
            const Cand& c = cands[i];
            if (c.crit / c.ub < best) {
                best = c.crit / c.ub;
                arg = c.x;
            }
        }
        tr.c_hat.push_back(best);
        tr.argmin.push_back(arg);
    }

    Config full = cfg;
    auto ratio_at = [&](const Vec& x) {
        if (!model.in_box(x) || is_feasible_strict(model, x, cfg)) {
            return kInf;
        }
        const ProjectionResult pr = distance_to_identified_set(model, x, full, &theta);
        return pr.converged && pr.distance > 0 ? model.criterion_raw(x) / pr.distance : kInf;
    };
    ShellDecision dec = decide_minorant(tr, theta, cfg, ratio_at);
    return make(Node::A3, dec.status, std::move(dec.evidence));
}

AssumptionVerdict check_minorant_support(const MomentModel& model, const SupportSolution& solution, const Vec& theta,
                                         const Config& cfg) {
    nlohmann::json ev;
    if (solution.multiplicity == Multiplicity::Unresolved) {
        ev["blocking"] = "support multiplicity unresolved";
        return make(Node::A4, Status::Inconclusive, ev);
    }
    const Mat basis = hyperplane_basis(solution.direction);
    std::vector<Vec> dirs;
    if (basis.cols() == 1) {
        dirs = {basis.col(0), -basis.col(0)};
    } else {
        for (const Vec& s : sphere_points(static_cast<std::size_t>(cfg.shell_points_support / 10),
                                          static_cast<std::size_t>(basis.cols()), cfg.seed)) {
            dirs.push_back(basis * s);
        }
    }
    auto ratio_at = [&](const Vec& x) {
        if (!model.in_box(x) || is_feasible_strict(model, x, cfg)) {
            return kInf;
        }
        const double crit = model.criterion_raw(x);
        const auto dist = distance_to_support_set(solution, x);
        if (!dist || crit <= 0.0 || *dist <= 1e-12) {
            return kInf;
        }
        return crit / *dist;
    };
    MinorantTrace tr;
    for (int k = cfg.shell_kmin; k <= cfg.shell_kmax; ++k) {
        double best = kInf;
        Vec arg;
        for (const Vec& x : shell_points(theta, dirs, k, static_cast<std::size_t>(cfg.shell_points_support))) {
            const double r = ratio_at(x);
            if (std::isfinite(r)) {
                ++tr.samples;
                if (r < best) {
                    best = r;
                    arg = x;
                }
            }
        }
        tr.shells.push_back(k);
        tr.c_hat.push_back(best);
        tr.argmin.push_back(arg);
    }
    ShellDecision dec = decide_minorant(tr, theta, cfg, ratio_at);
    return make(Node::A4, dec.status, std::move(dec.evidence));
}

AssumptionVerdict check_cone_pointy(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg) {
    const TangentSample sample = tangent_cone_sample(model, theta, cfg);
    std::vector<Vec> all = sample.members;
    all.insert(all.end(), sample.empirical.begin(), sample.empirical.end());
    const Vec pn = p.normalized();
    const double m = cone_max_inner(all, pn);
    nlohmann::json ev;
    ev["tested"] = sample.tested.size();
    ev["members"] = sample.members.size();
    ev["empirical"] = sample.empirical.size();
    ev["inconclusive"] = sample.inconclusive;
    ev["m_hat"] = std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr);
    const double m_members = cone_max_inner(sample.members, pn);
    if (all.empty()) {
        if (sample.inconclusive == 0) {
            ev["vacuous"] = true;
            return make(Node::A5, Status::Holds, ev);
        }
        return make(Node::A5, Status::Inconclusive, ev);
    }
    if (m >= cfg.margin || m_members >= -cfg.zero_tol) {
        for (const Vec& t : sample.members) {
            if (pn.dot(t) == m_members) {
                ev["witness"] = vec_json(t);
            }
        }
        return make(Node::A5, Status::Fails, ev);
    }
    if (m <= -cfg.margin) {
        return make(Node::A5, Status::Holds, ev);
    }
    return make(Node::A5, Status::Inconclusive, ev);
}

AssumptionVerdict check_cone_pointy_finite(const MomentModel& model, const Vec& p, const Vec& theta,
                                           const Config& cfg) {
    const Vec pn = p.normalized();
    nlohmann::json trace = nlohmann::json::array();
    double m = -kInf;
    bool any = false;
    for (double eta = cfg.finite_eta; eta >= cfg.empirical_eta_min * (1 - 1e-9); eta /= 10.0) {
        const auto dirs = empirical_directions(model, theta, eta, cfg);
        m = cone_max_inner(dirs, pn);
        any = any || !dirs.empty();
        trace.push_back({{"eta", eta}, {"directions", dirs.size()},
                         {"m", std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr)}});
    }
    nlohmann::json ev;
    ev["trace"] = trace;
    if (!std::isfinite(m)) {
        if (!any) {
            ev["vacuous"] = true;
            return make(Node::A5, Status::Holds, ev);
        }
        return make(Node::A5, Status::Inconclusive, ev);
    }
    if (m <= -cfg.margin) {
        return make(Node::A5, Status::Holds, ev);
    }
    // secants approach tangents at rate eta, so m -> 0 shows up at eta_min
    if (m >= -1e-2 * cfg.margin) {
        return make(Node::A5, Status::Fails, ev);
    }
    return make(Node::A5, Status::Inconclusive, ev);
}

AscentValue ascent_value(const MomentModel& model, const Vec& p, const Vec& theta, double delta, const Config& cfg) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    auto f = [&](const Vec& t) {
        double m = -kInf;
        for (Eigen::Index k = 0; k < cone.rows.rows(); ++k) {
            const double v = cone.rows.row(k).dot(t);
            m = std::max(m, cone.equality[static_cast<std::size_t>(k)] ? std::fabs(v) : v);
        }
        return m;
    };
    const Vec pn = p.normalized();
    AscentValue out;
    out.value = kInf;
    if (model.dim() == 2) {
        const double phi = std::atan2(pn[1], pn[0]);
        const double half = std::acos(std::clamp(delta, -1.0, 1.0));
        const int n = std::max(2, cfg.ascent_scan);
        auto angle = [&](double s) { return phi - half + 2.0 * half * s; };
        int best = 0;
        for (int i = 0; i <= n; ++i) {
            const double v = f(unit2(angle(static_cast<double>(i) / n)));
            if (v < out.value) {
                out.value = v;
                best = i;
            }
        }
        // golden-section on the bracketing grid cells
        double a = static_cast<double>(std::max(0, best - 1)) / n;
        double b = static_cast<double>(std::min(n, best + 1)) / n;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = f(unit2(angle(c))), fd = f(unit2(angle(d)));
        for (int it = 0; it < 60; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(unit2(angle(c)));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(unit2(angle(d)));
            }
        }
        const double s = fc < fd ? c : d;
        out.argmin = unit2(angle(best / static_cast<double>(n)));
        if (std::min(fc, fd) < out.value) {
            out.value = std::min(fc, fd);
            out.argmin = unit2(angle(s));
        }
        return out;
    }
    const auto d = model.dim();
    for (const Vec& t : sphere_points(static_cast<std::size_t>(cfg.sphere_samples), d, cfg.seed)) {
        if (pn.dot(t) >= delta) {
            const double v = f(t);
            if (v < out.value) {
                out.value = v;
                out.argmin = t;
            }
        }
    }
    if (out.argmin.size() == 0) {
        return out;
    }
    // pattern search on the sphere cap
    Rng rng(cfg.seed);
    double step = 0.1;
    while (step > 1e-9) {
        bool improved = false;
        for (std::size_t i = 0; i < 2 * d; ++i) {
            Vec t = out.argmin;
            t[static_cast<Eigen::Index>(i / 2)] += (i % 2 == 0 ? step : -step);
            t.normalize();
            if (pn.dot(t) < delta) {
                continue;
            }
            const double v = f(t);
            if (v < out.value) {
                out.value = v;
                out.argmin = t;
                improved = true;
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    return out;
}

namespace {

AssumptionVerdict ascent_verdict(const AscentValue& av, const Config& cfg) {
    nlohmann::json ev;
    ev["v"] = std::isfinite(av.value) ? nlohmann::json(av.value) : nlohmann::json(nullptr);
    if (av.argmin.size() > 0) {
        ev["argmin"] = vec_json(av.argmin);
    }
    if (av.value >= cfg.margin) {
        return make(Node::A7, Status::Holds, ev);
    }
    if (av.value <= cfg.zero_tol) {
        return make(Node::A7, Status::Fails, ev);
    }
    return make(Node::A7, Status::Inconclusive, ev);
}

}  // namespace

AssumptionVerdict check_ascent(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg) {
    return ascent_verdict(ascent_value(model, p, theta, 0.0, cfg), cfg);
}

AssumptionVerdict check_ascent_original(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg) {
    return ascent_verdict(ascent_value(model, p, theta, cfg.ascent_original_delta, cfg), cfg);
}

}  // namespace cqkit
