#include "cqkit/random_model.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "cqkit/dsl.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/report.hpp"
#include "cqkit/sampling.hpp"
#include "cqkit/support.hpp"

namespace cqkit {

namespace {

constexpr std::size_t kDim = 2;

Rational draw(Rng& rng, int den) {
    return Rational(static_cast<long>(rng.integer(-den, den)), den);
}

struct Drawn {
    Polynomial poly{kDim};
    Vec linear = Vec::Zero(kDim);
    bool tight = false;
};

// sum_alpha c_alpha u^alpha - s with u = theta - anchor.
Drawn draw_constraint(Rng& rng, const std::vector<Rational>& anchor, int den, int degree, bool force_tight) {
    std::vector<Polynomial> u;
    for (std::size_t i = 0; i < kDim; ++i) {
        u.push_back(Polynomial::variable(kDim, i) - Polynomial::constant(kDim, anchor[i]));
    }
    Drawn out;
    const bool pure_quadratic = degree >= 2 && rng.uniform() < 0.2;
    bool quad_nonzero = false;
    for (;;) {
        out.poly = Polynomial(kDim);
        out.linear.setZero();
        quad_nonzero = false;
        if (!pure_quadratic) {
            for (std::size_t i = 0; i < kDim; ++i) {
                const Rational c = draw(rng, den);
                out.poly += u[i] * c;
                out.linear[i] = c.get_d();
            }
        }
        const Polynomial quads[3] = {u[0] * u[0], u[0] * u[1], u[1] * u[1]};
        for (const auto& q : quads) {
            if (degree >= 2 && rng.uniform() < 0.5) {
                const Rational c = draw(rng, den);
                quad_nonzero = quad_nonzero || c != 0;
                out.poly += q * c;
            }
        }
        if (!out.poly.is_zero() && (!pure_quadratic || quad_nonzero)) {
            break;
        }
    }
    out.tight = force_tight || rng.uniform() < 0.4;
    if (!out.tight) {
        const Rational s(static_cast<long>(rng.integer(1, den)), 2 * den);
        out.poly -= Polynomial::constant(kDim, s);
    }
    return out;
}

bool near_box(const MomentModel& model, const Vec& x, double margin) {
    for (std::size_t i = 0; i < model.dim(); ++i) {
        if (x[i] - model.lower()[i] < margin || model.upper()[i] - x[i] < margin) {
            return true;
        }
    }
    return false;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed, const Config& cfg, const RandomModelOptions& opts) {
    if (opts.max_degree < 1 || opts.max_degree > 2) {
        throw ValidationError("random models support degree 1 or 2");
    }
    Rng rng(seed);
    const int den = opts.denominator;
    for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
        std::vector<Rational> anchor;
        Vec anchor_d(kDim);
        for (std::size_t i = 0; i < kDim; ++i) {
            anchor.emplace_back(static_cast<long>(rng.integer(-4, 4)), 8);
            anchor_d[i] = anchor.back().get_d();
        }
        const int m = static_cast<int>(rng.integer(1, opts.max_inequalities));
        std::vector<Polynomial> ineq, eq;
        std::vector<Vec> tight_normals;
        for (int j = 0; j < m; ++j) {
            Drawn c = draw_constraint(rng, anchor, den, opts.max_degree, false);
            if (c.tight && c.linear.norm() > 0) {
                tight_normals.push_back(c.linear);
            }
            ineq.push_back(std::move(c.poly));
        }
        if (rng.uniform() < opts.equality_probability) {
            eq.push_back(draw_constraint(rng, anchor, den, opts.max_degree, true).poly);
        }

        // Sometimes aim at the anchor's normal cone so it becomes the support point.
        Vec p = Vec::Zero(kDim);
        if (!tight_normals.empty() && rng.uniform() < 0.35) {
            for (const auto& g : tight_normals) {
                p += (0.25 + rng.uniform()) * g.normalized();
            }
        }
        if (p.norm() < 1e-6) {
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            p << std::cos(a), std::sin(a);
        }
        p.normalize();

        MomentModel model(kDim, {Rational(-1), Rational(-1)}, {Rational(1), Rational(1)}, std::move(ineq),
                          std::move(eq));
        try {
            const SupportSolution s = solve_support(model, p, cfg);
            bool ok = !s.points.empty();
            for (const auto& sp : s.points) {
                ok = ok && !near_box(model, sp.point, opts.box_margin);
            }
            for (const auto& pc : s.pieces) {
                ok = ok && !near_box(model, pc.a, opts.box_margin) && !near_box(model, pc.b, opts.box_margin);
            }
            if (ok) {
                return {std::move(model), p, anchor_d, seed, attempt};
            }
        } catch (const EmptyIdentifiedSet&) {
        }
    }
    throw ValidationError("no admissible random model after " + std::to_string(opts.max_attempts) + " attempts");
}

std::uint64_t sweep_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 of (seed, index)
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 1;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomAuditSummary audit_random(std::size_t count, std::uint64_t seed, const Config& cfg,
                                const RandomModelOptions& opts, int threads) {
    RandomAuditSummary summary;
    summary.entries.resize(count);
    auto work = [&](std::size_t i) {
        RandomAuditEntry& e = summary.entries[i];
        e.seed = sweep_seed(seed, i);
        const RandomInstance inst = random_instance(e.seed, cfg, opts);
        const CheckReport rep = run_check(inst.model, inst.direction, cfg, {false});
        e.fingerprint = rep.fingerprint;
        e.model_text = serialize_model(inst.model);
        e.direction = rep.direction;
        e.points = rep.points.size();
        for (const auto& p : rep.points) {
            for (const auto& [n, st] : p.nodes) {
                ++e.verdicts;
                e.inconclusive += st == Status::Inconclusive;
            }
            for (const auto& v : p.violations) {
                e.violations.push_back(v.rule);
            }
        }
        e.report = report_json(rep, cfg);
        e.report.erase("timings");
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            work(i);
        }
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += nthreads) {
                        work(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    for (const auto& e : summary.entries) {
        summary.violations += e.violations.size();
        summary.verdicts += e.verdicts;
        summary.inconclusive += e.inconclusive;
    }
    return summary;
}

}  // namespace cqkit
