// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cqkit/cones.hpp"
#include "cqkit/cq.hpp"
#include "cqkit/examples.hpp"
#include "cqkit/grid_oracle.hpp"
#include "cqkit/random_model.hpp"
#include "cqkit/registry.hpp"
#include "cqkit/report.hpp"
#include "cqkit/sampling.hpp"
#include "cqkit/support.hpp"

using namespace cqkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

const Config kCfg = Config::from_environment();

// Registry reports are shared by criteria 1, 2 and 6.
std::map<std::string, CheckReport> g_reports;
std::map<std::string, double> g_seconds;

const CheckReport& registry_report(const std::string& name) {
    auto it = g_reports.find(name);
    if (it == g_reports.end()) {
        const auto entry = registry_get(name);
        const auto t0 = Clock::now();
        it = g_reports.emplace(name, run_check(entry.model, entry.direction, kCfg)).first;
        g_seconds[name] = seconds_since(t0);
    }
    return it->second;
}

const PointReport& point_near(const CheckReport& rep, const Vec& target) {
    return rep.points[rep.closest_point(target)];
}

void criterion_golden(Outcome& o) {
    const auto t0 = Clock::now();
    std::size_t stated = 0, inconclusive = 0, mismatches = 0;
    for (const std::string name : {"cx1", "cx2", "cx3", "cx4", "cx5"}) {
        const auto entry = registry_get(name);
        const auto& rep = registry_report(name);
        const auto& pt = point_near(rep, v2(0, 0));
        o.require(pt.point.norm() <= 1e-6, name + ": support point not at the origin");
        for (const auto& [n, want] : entry.expected) {
            ++stated;
            const Status got = pt.nodes.at(n);
            inconclusive += got == Status::Inconclusive;
            if (got != want) {
                ++mismatches;
                o.require(false, name + " " + std::string(to_string(n)) + ": expected " +
                                     std::string(to_string(want)) + ", got " + std::string(to_string(got)));
            }
        }
    }
    const double secs = seconds_since(t0);
    o.require(secs < 30.0, "runtime over 30 s");
    o.detail << stated << " stated verdicts, " << mismatches << " mismatches, " << inconclusive
             << " inconclusive, " << secs << " s";
}

void criterion_fig1(Outcome& o) {
    for (const std::string name : {"fig1-left", "fig1-right"}) {
        const auto& rep = registry_report(name);
        const auto& pt = point_near(rep, v2(0, 1));
        const double err = (pt.point - v2(0, 1)).norm();
        o.require(err <= 1e-6, name + ": support point off by " + std::to_string(err));
        o.require(pt.nodes.at(Node::MFCQ) == Status::Fails, name + ": MFCQ does not fail");
        if (name == "fig1-left") {
            o.require(pt.nodes.at(Node::ACQ) == Status::Fails, name + ": ACQ does not fail");
        }
        o.require(rep.audit_clean(), name + ": audit violation");
        o.detail << name << " |theta*-(0,1)| = " << err << "; ";
    }
    o.detail << "MFCQ/ACQ as stated, audits clean";
}

void criterion_entry_game(Outcome& o) {
    const EntryGameSpec third{Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    const MomentModel model = build_entry_game(third);

    const CheckReport up = run_check(model, v2(0, 1), kCfg);
    const auto& pt = point_near(up, v2(1.0 / 3, 0.5));
    o.require((pt.point - v2(1.0 / 3, 0.5)).norm() <= 1e-6, "p=(0,1): theta* not at (1/3, 1/2)");
    const NodeStatus want{{Node::A2, Status::Fails},  {Node::A3, Status::Holds},   {Node::A4, Status::Holds},
                          {Node::A5, Status::Holds},  {Node::A7, Status::Holds},   {Node::LICQ, Status::Holds},
                          {Node::ACQ, Status::Holds}};
    for (const auto& m : golden_mismatches(pt.nodes, want)) {
        o.require(false, "p=(0,1) " + m);
    }

    const CheckReport diag = run_check(model, v2(1, -1).normalized(), kCfg);
    const NodeStatus want_diag{{Node::A4, Status::Fails}, {Node::A5, Status::Fails}, {Node::A7, Status::Fails}};
    for (const auto& p : diag.points) {
        std::ostringstream where;
        where << "p=(1,-1)/sqrt2 at (" << p.point[0] << ", " << p.point[1] << ") ";
        for (const auto& m : golden_mismatches(p.nodes, want_diag)) {
            o.require(false, where.str() + m);
        }
    }

    Rng rng(kCfg.seed);
    double worst = 0.0;
    int solved = 0;
    for (int k = 0; k < 20; ++k) {
        const long a = rng.integer(1, 20), b = rng.integer(1, 20), c = rng.integer(1, 20);
        auto frac = [&](long num) {
            Rational q(num, a + b + c);
            q.canonicalize();
            return q;
        };
        const EntryGameSpec spec{frac(a), frac(b), frac(c)};
        const MomentModel m = build_entry_game(spec);
        for (const Vec& p : {v2(0, 1), v2(1, 0)}) {
            const auto closed = entry_game_support_point(spec, p);
            const auto sol = solve_support(m, p, kCfg);
            double best = INFINITY;
            for (const auto& sp : sol.points) {
                best = std::min(best, (sp.point - *closed).norm());
            }
            worst = std::max(worst, best);
            ++solved;
        }
    }
    o.require(worst <= 1e-6, "random pi: closed-form gap " + std::to_string(worst));
    o.detail << "p=(0,1) theta*=(" << pt.point[0] << ", " << pt.point[1] << "); " << solved
             << " random-pi solves, worst closed-form gap " << worst;
}

void criterion_interval(Outcome& o) {
    const IntervalModel im = build_interval_regression(hexagon_spec());
    Rng rng(kCfg.seed ^ 0x1A7E);
    std::vector<Vec> dirs;
    for (int k = 0; k < 20; ++k) {
        const double a = 2 * std::numbers::pi * rng.uniform();
        dirs.push_back(v2(std::cos(a), std::sin(a)));
    }
    double worst = 0.0;
    for (const auto& p : dirs) {
        const auto sol = solve_support(im.model, p, kCfg);
        worst = std::max(worst, std::abs(sol.value - interval_lp_value(im, p)));
    }
    o.require(worst <= 1e-8, "LP value gap " + std::to_string(worst));

    // Facet normals on top of the random directions so every face kind is seen.
    std::vector<Vec> probe = dirs;
    for (const auto& c : hexagon_spec().cells) {
        probe.push_back(c.z.normalized());
        probe.push_back(-c.z.normalized());
    }
    std::map<std::string, int> kinds;
    int compared = 0;
    for (const auto& p : probe) {
        const auto face = classify_support_face(im, p);
        ++kinds[to_string(face.kind)];
        const auto sol = solve_support(im.model, p, kCfg);
        for (const auto& sp : sol.points) {
            NodeStatus got;
            got[Node::MFCQ] = check_mfcq(im.model, sp.point, kCfg).status;
            got[Node::LICQ] = check_licq(im.model, sp.point, kCfg).status;
            for (const auto& m : golden_mismatches(got, face.predicted)) {
                std::ostringstream os;
                os << to_string(face.kind) << " at (" << sp.point[0] << ", " << sp.point[1] << "): " << m;
                o.require(false, os.str());
            }
            compared += static_cast<int>(face.predicted.size());
        }
    }
    o.detail << "worst LP gap " << worst << " over 20 directions; " << compared << " predictions checked (";
    for (const auto& [k, n] : kinds) {
        o.detail << k << " " << n << " ";
    }
    o.detail << ")";
}

void criterion_random_audit(Outcome& o) {
    const auto t0 = Clock::now();
    const auto s = audit_random(200, 1, kCfg, {}, kCfg.parallel);
    o.require(s.violations == 0, std::to_string(s.violations) + " audit violations");
    o.require(s.inconclusive_rate() <= 0.2, "inconclusive rate above 20%");
    for (const auto& e : s.entries) {
        for (const auto& v : e.violations) {
            o.notes.push_back("seed " + std::to_string(e.seed) + ": " + v);
        }
    }
    o.detail << "200 models, " << s.violations << " violations, inconclusive " << s.inconclusive << "/" << s.verdicts
             << " (" << 100.0 * s.inconclusive_rate() << "%), " << seconds_since(t0) << " s";
}

void criterion_variants(Outcome& o) {
    int pairs = 0;
    for (const auto& name : registry_names()) {
        const auto& rep = registry_report(name);
        for (const auto& pt : rep.points) {
            const auto& cc = pt.cross_checks;
            const std::string a5 = std::string(to_string(pt.nodes.at(Node::A5)));
            const std::string a7 = std::string(to_string(pt.nodes.at(Node::A7)));
            o.require(cc["A5_finite_eta"]["status"] == a5,
                      name + ": finite-eta A5 " + cc["A5_finite_eta"]["status"].get<std::string>() + " vs " + a5);
            o.require(cc["A7_original"]["status"] == a7,
                      name + ": original A7 " + cc["A7_original"]["status"].get<std::string>() + " vs " + a7);
            pairs += 2;
        }
    }
    o.detail << pairs << " verdict pairs over " << registry_names().size() << " registry models";
}

Polynomial random_polynomial(Rng& rng, std::size_t d) {
    Polynomial p(d);
    const int terms = static_cast<int>(rng.integer(1, 6));
    for (int t = 0; t < terms; ++t) {
        Exponent e(d, 0);
        int budget = static_cast<int>(rng.integer(0, 4));
        for (std::size_t i = 0; i < d && budget > 0; ++i) {
            const int k = static_cast<int>(rng.integer(0, budget));
            e[i] = static_cast<std::uint32_t>(k);
            budget -= k;
        }
        p.add_term(e, Rational(static_cast<long>(rng.integer(-9, 9)), static_cast<long>(rng.integer(1, 7))));
    }
    return p;
}

void criterion_hygiene(Outcome& o) {
    Rng rng(kCfg.seed + 7);
    double worst_fd = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t d = static_cast<std::size_t>(rng.integer(1, 3));
        const Polynomial poly = random_polynomial(rng, d);
        const auto grad = poly.gradient();
        std::vector<double> x(d);
        for (auto& xi : x) {
            xi = 2 * rng.uniform() - 1;
        }
        for (std::size_t i = 0; i < d; ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (poly.evaluate(xp) - poly.evaluate(xm)) / (2 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - grad[i].evaluate(x)));
        }
    }
    o.require(worst_fd <= 1e-6, "gradient vs finite difference " + std::to_string(worst_fd));

    double worst_grid = 0.0;
    Rng qrng(kCfg.seed + 11);
    for (const auto& name : registry_names()) {
        const auto entry = registry_get(name);
        const GridOracle oracle(entry.model, 1e-3);
        for (int k = 0; k < 25; ++k) {
            Vec q(2);
            for (int i = 0; i < 2; ++i) {
                q[i] = entry.model.lower()[i] + (entry.model.upper()[i] - entry.model.lower()[i]) * qrng.uniform();
            }
            const auto r = distance_to_identified_set(entry.model, q, kCfg);
            o.require(r.converged, name + ": projection did not converge");
            worst_grid = std::max(worst_grid, std::abs(r.distance - oracle.distance(q)));
        }
    }
    o.require(worst_grid <= 2e-3, "projection vs grid oracle " + std::to_string(worst_grid));

    double worst_mfcq = 0.0;
    int mfcq_cases = 0;
    auto compare_mfcq = [&](const MomentModel& m, const Vec& theta) {
        if (m.num_eq() > 0) {
            return;
        }
        const auto prog = mfcq_program(m, theta, kCfg);
        if (!prog.bounded) {
            return;
        }
        const auto cone = linearized_cone(m, theta, kCfg.tol_active);
        worst_mfcq = std::max(worst_mfcq, std::abs(prog.s_star - mfcq_bruteforce(cone.rows)));
        ++mfcq_cases;
    };
    for (const auto& name : registry_names()) {
        for (const auto& pt : registry_report(name).points) {
            compare_mfcq(registry_get(name).model, pt.point);
        }
    }
    for (std::size_t i = 0; i < 40; ++i) {
        const auto inst = random_instance(sweep_seed(kCfg.seed, i), kCfg);
        compare_mfcq(inst.model, inst.anchor);
        for (const auto& sp : solve_support(inst.model, inst.direction, kCfg).points) {
            compare_mfcq(inst.model, sp.point);
        }
    }
    o.require(worst_mfcq <= 1e-3, "MFCQ LP vs brute force " + std::to_string(worst_mfcq));
    o.detail << "FD worst " << worst_fd << " (1000 pairs); grid worst " << worst_grid << "; MFCQ worst " << worst_mfcq
             << " (" << mfcq_cases << " points)";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"counterexample golden table", criterion_golden},
        {"figure-1 models", criterion_fig1},
        {"entry game", criterion_entry_game},
        {"interval regression", criterion_interval},
        {"implication audit on random models", criterion_random_audit},
        {"finite-radius and original-form cross-checks", criterion_variants},
        {"numerical hygiene", criterion_hygiene},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.str().c_str());
        for (const auto& n : o.notes) {
            std::printf("    %s\n", n.c_str());
        }
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
