#include "cqkit/cones.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "cqkit/errors.hpp"
#include "cqkit/sampling.hpp"

namespace cqkit {

const char* to_string(Membership m) {
    switch (m) {
    case Membership::Member:
        return "member";
    case Membership::NonMember:
        return "non-member";
    case Membership::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

ConeDescription linearized_cone(const MomentModel& model, const Vec& theta, double tol_active) {
    const ActiveSet act = active_set(model, theta, tol_active);
    ConeDescription out;
    out.base_point = theta;
    out.indices = act.all();
    const Mat jac = model.jacobian(theta);
    out.rows.resize(static_cast<Eigen::Index>(out.indices.size()), jac.cols());
    for (std::size_t k = 0; k < out.indices.size(); ++k) {
        out.rows.row(static_cast<Eigen::Index>(k)) = jac.row(static_cast<Eigen::Index>(out.indices[k]));
        // gradients that vanish at the exact point come out as rounding noise
        if (out.rows.row(static_cast<Eigen::Index>(k)).norm() <= kVanishingGradient) {
            out.rows.row(static_cast<Eigen::Index>(k)).setZero();
        }
        out.equality.push_back(model.is_equality(out.indices[k]));
    }
    if (model.dim() != 2) {
        return out;
    }
    out.full_space = true;
    for (Eigen::Index k = 0; k < out.rows.rows(); ++k) {
        const Vec g = out.rows.row(k).transpose();
        const double n = g.norm();
        if (n == 0.0) {
            continue;
        }
        out.full_space = false;
        Vec r(2);
        r << -g[1] / n, g[0] / n;
        for (const Vec& c : {Vec(r), Vec(-r)}) {
            if (!in_linearized_cone(out, c, 1e-9)) {
                continue;
            }
            const bool dup = std::any_of(out.generator_rays.begin(), out.generator_rays.end(),
                                         [&](const Vec& e) { return (e - c).norm() <= 1e-12; });
            if (!dup) {
                out.generator_rays.push_back(c);
            }
        }
    }
    return out;
}

bool in_linearized_cone(const ConeDescription& cone, const Vec& t, double tol) {
    for (Eigen::Index k = 0; k < cone.rows.rows(); ++k) {
        const double v = cone.rows.row(k).dot(t);
        const double scale = tol * cone.rows.row(k).norm();
        if (cone.equality[static_cast<std::size_t>(k)] ? std::fabs(v) > scale : v > scale) {
            return false;
        }
    }
    return true;
}

MembershipResult tangent_membership(const MomentModel& model, const Vec& theta, const Vec& t, const Config& cfg) {
    MembershipResult out;
    Config local = cfg;
    local.multistart = cfg.tangent_multistart;
    const int persist = std::max(1, cfg.persistence);
    std::vector<int> scales;
    for (int k = cfg.tangent_kmax; k > cfg.tangent_kmax - persist && k >= cfg.tangent_kmin; --k) {
        scales.push_back(k);
    }
    if (cfg.tangent_kmin < cfg.tangent_kmax - persist + 1) {
        scales.push_back(cfg.tangent_kmin);
    }
    std::vector<double> last;
    double r_min_scale = std::numeric_limits<double>::quiet_NaN();
    for (int k : scales) {
        const double gamma = std::ldexp(1.0, -k);
        const Vec q = theta + gamma * t;
        if (!model.in_box(q)) {
            return out;
        }
        const ProjectionResult pr = distance_to_identified_set(model, q, local, &theta);
        if (!pr.converged) {
            return out;
        }
        const double r = pr.distance / gamma;
        out.trace.emplace_back(k, r);
        if (k > cfg.tangent_kmax - persist) {
            last.push_back(r);
            // the finest scale alone can rule out both definite verdicts
            if (last.size() == 1 && r >= cfg.member_threshold && r < cfg.nonmember_threshold) {
                return out;
            }
        } else {
            r_min_scale = r;
        }
    }
    std::sort(out.trace.begin(), out.trace.end());
    const double lo = *std::min_element(last.begin(), last.end());
    const double hi = *std::max_element(last.begin(), last.end());
    if (lo >= cfg.nonmember_threshold) {
        out.verdict = Membership::NonMember;
    } else if (hi < cfg.member_threshold) {
        const double r_max_scale = out.trace.back().second;
        const bool trend = std::isnan(r_min_scale) || r_max_scale <= r_min_scale + 1e-9;
        if (trend) {
            out.verdict = Membership::Member;
        }
    }
    return out;
}

std::vector<Vec> linearized_directions(const ConeDescription& cone, const Config& cfg) {
    const auto d = cone.base_point.size();
    std::vector<Vec> out;
    if (d == 2) {
        const int n = std::max(4, cfg.angle_grid);
        std::vector<std::pair<double, Vec>> tagged;
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * k / n;
            Vec t(2);
            t << std::cos(a), std::sin(a);
            if (in_linearized_cone(cone, t, cfg.cone_tol)) {
                tagged.emplace_back(a, t);
            }
        }
        for (const Vec& r : cone.generator_rays) {
            double a = std::atan2(r[1], r[0]);
            if (a < 0) {
                a += 2.0 * std::numbers::pi;
            }
            const bool dup =
                std::any_of(tagged.begin(), tagged.end(), [&](const auto& e) { return (e.second - r).norm() <= 1e-12; });
            if (!dup) {
                tagged.emplace_back(a, r);
            }
        }
        std::sort(tagged.begin(), tagged.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& e : tagged) {
            out.push_back(std::move(e.second));
        }
        return out;
    }
    for (const Vec& t : sphere_points(static_cast<std::size_t>(cfg.sphere_samples), static_cast<std::size_t>(d), cfg.seed)) {
        if (in_linearized_cone(cone, t, cfg.cone_tol)) {
            out.push_back(t);
        }
    }
    return out;
}

std::vector<Vec> empirical_directions(const MomentModel& model, const Vec& theta, double eta, const Config& cfg) {
    Config local = cfg;
    local.multistart = cfg.tangent_multistart;
    std::vector<Vec> out;
    for (const Vec& u : ball_points(static_cast<std::size_t>(cfg.empirical_points), model.dim(), cfg.seed)) {
        const Vec q = theta + eta * u;
        if (!model.in_box(q)) {
            continue;
        }
        Vec x = q;
        if (!is_feasible_strict(model, q, cfg)) {
            const ProjectionResult pr = distance_to_identified_set(model, q, local, &theta);
            if (!pr.converged) {
                continue;
            }
            x = pr.nearest_feasible;
        }
        const double n = (x - theta).norm();
        if (n > 1e-3 * eta) {
            out.push_back((x - theta) / n);
        }
    }
    return out;
}

TangentSample tangent_cone_sample(const MomentModel& model, const Vec& theta, const Config& cfg) {
    TangentSample out;
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    out.tested = linearized_directions(cone, cfg);
    const std::size_t n = out.tested.size();
    std::vector<std::optional<Membership>> v(n);
    auto test = [&](std::size_t i) -> Membership {
        if (!v[i]) {
            v[i] = tangent_membership(model, theta, out.tested[i], cfg).verdict;
        }
        return *v[i];
    };

    if (model.dim() == 2 && n > 0) {
        // contiguous arcs of the angular grid; verdicts are refined by
        // bisection between coarse probes that disagree
        const double step = 2.0 * std::numbers::pi / std::max(4, cfg.angle_grid);
        auto angle = [&](std::size_t i) { return std::atan2(out.tested[i][1], out.tested[i][0]); };
        std::vector<std::pair<std::size_t, std::size_t>> arcs;
        std::size_t start = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (i == n || std::fabs(std::remainder(angle(i) - angle(i - 1), 2.0 * std::numbers::pi)) > 1.5 * step) {
                arcs.emplace_back(start, i - 1);
                start = i;
            }
        }
        std::function<void(std::size_t, std::size_t)> refine = [&](std::size_t a, std::size_t b) {
            if (b <= a + 1) {
                return;
            }
            const Membership va = test(a), vb = test(b);
            if (va == vb && va != Membership::Inconclusive) {
                for (std::size_t i = a + 1; i < b; ++i) {
                    v[i] = va;
                }
                return;
            }
            const std::size_t mid = a + (b - a) / 2;
            test(mid);
            refine(a, mid);
            refine(mid, b);
        };
        const auto stride = static_cast<std::size_t>(std::max(1, cfg.angle_stride));
        for (const auto& [a, b] : arcs) {
            std::size_t prev = a;
            test(a);
            for (std::size_t i = a + stride; i < b; i += stride) {
                refine(prev, i);
                prev = i;
            }
            refine(prev, b);
            test(b);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            test(i);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        out.verdicts.push_back(*v[i]);
        if (*v[i] == Membership::Member) {
            out.members.push_back(out.tested[i]);
        } else if (*v[i] == Membership::Inconclusive) {
            ++out.inconclusive;
        }
    }
    for (const Vec& t : empirical_directions(model, theta, cfg.empirical_eta_min, cfg)) {
        if (in_linearized_cone(cone, t, 1e-6)) {
            out.empirical.push_back(t);
        }
    }
    return out;
}

std::vector<std::pair<double, double>> linearized_arcs(const ConeDescription& cone, const Config& cfg) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (cone.full_space) {
        return {{0.0, two_pi}};
    }
    const std::vector<Vec> dirs = linearized_directions(cone, cfg);
    std::vector<std::pair<double, double>> arcs;
    if (dirs.empty()) {
        return arcs;
    }
    const double step = two_pi / std::max(4, cfg.angle_grid);
    auto angle = [](const Vec& t) {
        const double a = std::atan2(t[1], t[0]);
        return a < 0 ? a + two_pi : a;
    };
    double start = angle(dirs[0]), prev = start;
    for (std::size_t i = 1; i < dirs.size(); ++i) {
        const double a = angle(dirs[i]);
        if (a - prev > 1.5 * step) {
            arcs.emplace_back(start, prev - start);
            start = a;
        }
        prev = a;
    }
    arcs.emplace_back(start, prev - start);
    // an arc through angle 0 appears split in two
    if (arcs.size() > 1 && arcs.front().first + two_pi - (arcs.back().first + arcs.back().second) <= 1.5 * step) {
        arcs.back().second = arcs.front().first + arcs.front().second + two_pi - arcs.back().first;
        arcs.erase(arcs.begin());
    }
    if (arcs.size() == 1 && arcs[0].second >= two_pi - 1.5 * step) {
        return {{0.0, two_pi}};
    }
    return arcs;
}

double cone_max_inner(const std::vector<Vec>& directions, const Vec& p) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& t : directions) {
        best = std::max(best, p.dot(t));
    }
    return best;
}

}  // namespace cqkit
