#include <doctest.h>

#include <cmath>

#include "cqkit/dsl.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/grid_oracle.hpp"
#include "cqkit/registry.hpp"
#include "cqkit/sampling.hpp"
#include "cqkit/support.hpp"

using namespace cqkit;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

const char* kEntry =
    "params theta[2] in box(-1/4,5/4)\n"
    "eq: 2/3 - theta1 - theta2 + theta1*theta2\n"
    "ineq: theta2 - theta1*theta2 - 1/3\n"
    "ineq: theta1 - theta1*theta2 - 1/3\n";

}  // namespace

TEST_CASE("entry game support point") {
    const auto model = parse_model(kEntry);
    const auto s = solve_support(model, v2(0, 1), Config{});
    CHECK(s.value == doctest::Approx(0.5).epsilon(1e-9));
    REQUIRE(s.points.size() == 1);
    CHECK((s.points[0].point - v2(1.0 / 3, 0.5)).norm() < 1e-6);
    CHECK(s.multiplicity == Multiplicity::Singleton);
    // equality and the second-row inequality bind
    CHECK(s.points[0].active.active_equalities.size() == 1);
    CHECK(s.points[0].active.active_inequalities == std::vector<std::size_t>{0});
}

TEST_CASE("cusp support point") {
    for (const char* name : {"fig1-left", "fig1-right"}) {
        const auto e = registry_get(name);
        const auto s = solve_support(e.model, e.direction, Config{});
        REQUIRE(s.points.size() == 1);
        CHECK((s.points[0].point - v2(0, 1)).norm() < 1e-6);
        CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.multiplicity == Multiplicity::Singleton);
    }
}

TEST_CASE("halfspace has a non-singleton support set") {
    const auto model = parse_model("params theta[2] in box(-1,1)\nineq: theta2\n");
    const auto s = solve_support(model, v2(0, 1), Config{});
    CHECK(s.value == 0.0);
    CHECK(s.multiplicity == Multiplicity::NonSingleton);
    CHECK(*distance_to_support_set(s, v2(0.3, -0.4)) == doctest::Approx(0.4));
}

TEST_CASE("distance to the support set") {
    const auto cx1 = registry_get("cx1");
    const auto s1 = solve_support(cx1.model, cx1.direction, Config{});
    CHECK(*distance_to_support_set(s1, s1.points[0].point) == 0.0);
    CHECK(*distance_to_support_set(s1, v2(0.1, 0)) == doctest::Approx(0.1).epsilon(1e-9));

    const auto cx5 = registry_get("cx5");
    const auto s5 = solve_support(cx5.model, cx5.direction, Config{});
    REQUIRE(s5.multiplicity == Multiplicity::NonSingleton);
    CHECK(*distance_to_support_set(s5, v2(-0.3, 0)) <= 1e-12);

    // support set from the grid oracle: feasible grid points on the top row
    const GridOracle oracle(cx5.model, 1e-3);
    const auto grid_s = oracle.argmax(cx5.direction, 1e-12);
    REQUIRE(!grid_s.empty());
    Rng rng(5);
    for (int k = 0; k < 50; ++k) {
        const Vec q = v2(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
        double g = INFINITY;
        for (const Vec& x : grid_s) {
            g = std::min(g, (q - x).norm());
        }
        CHECK(std::fabs(*distance_to_support_set(s5, q) - g) <= 2e-3);
    }
}

TEST_CASE("support value dominates feasible points") {
    Config cfg;
    for (const auto& name : registry_names()) {
        const auto e = registry_get(name);
        const auto s = solve_support(e.model, e.direction, cfg);
        if (e.known_support_point) {
            CHECK(*distance_to_support_set(s, *e.known_support_point) <= 1e-6);
        }
        Rng rng(11);
        int checked = 0;
        for (int k = 0; k < 200; ++k) {
            Vec q(2);
            for (int i = 0; i < 2; ++i) {
                q[i] = e.model.lower()[i] + (e.model.upper()[i] - e.model.lower()[i]) * rng.uniform();
            }
            Config quick = cfg;
            quick.multistart = 2;
            const auto r = distance_to_identified_set(e.model, q, quick);
            if (!r.converged) {
                continue;
            }
            ++checked;
            CHECK(e.direction.dot(r.nearest_feasible) <= s.value + 1e-6);
        }
        CHECK(checked > 150);
    }
}

TEST_CASE("direction scaling leaves the solution unchanged") {
    const auto model = parse_model(kEntry);
    const auto a = solve_support(model, v2(0.6, 0.8), Config{});
    const auto b = solve_support(model, v2(1.2, 1.6), Config{});
    CHECK(a.value == b.value);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].point == b.points[i].point);
    }
}

TEST_CASE("empty identified set is reported") {
    const auto model = parse_model("params theta[2] in box(-1,1)\nineq: 1 - theta1^2\n ineq: theta1^2 - 1/4\n");
    CHECK_THROWS_AS(solve_support(model, v2(0, 1), Config{}), EmptyIdentifiedSet);
}
