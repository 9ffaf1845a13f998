#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "cqkit/dsl.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/grid_oracle.hpp"
#include "cqkit/registry.hpp"

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

TEST_CASE("criterion") {
    const auto cx1 = registry_get("cx1").model;
    CHECK(criterion(cx1, v2(0, 0)) == 0.0);
    CHECK(criterion(cx1, v2(0.5, 0)) == 0.5);
    CHECK_THROWS_AS(criterion(cx1, v2(1.5, 0)), OutOfBox);
    const auto entry = parse_model(kEntry);
    CHECK(criterion(entry, v2(0, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("feasibility") {
    const auto fig = registry_get("fig1-left").model;
    CHECK(is_feasible(fig, v2(0, 0.5), 1e-9));
    CHECK_FALSE(is_feasible(fig, v2(0, 1.1), 1e-9));
    CHECK(is_feasible(fig, v2(0, 1), 1e-9));
}

TEST_CASE("active sets") {
    const auto cx2 = registry_get("cx2").model;
    CHECK(active_set(cx2, v2(0, 0), 1e-7).active_inequalities == std::vector<std::size_t>{0, 1, 2});
    const auto cx1 = registry_get("cx1").model;
    CHECK(active_set(cx1, v2(0, -0.5), 1e-7).active_inequalities.empty());
    CHECK_THROWS_AS(active_set(cx1, v2(0, 0.5), 1e-7), InfeasiblePoint);

    const auto entry = parse_model(kEntry);
    const auto as = active_set(entry, v2(1.0 / 3.0, 0.5), 1e-7);
    CHECK(as.active_inequalities == std::vector<std::size_t>{0});
    CHECK(as.active_equalities == std::vector<std::size_t>{2});

    // widening the tolerance only adds constraints
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 200; ++k) {
        const Vec x = v2(u(gen), u(gen));
        if (!is_feasible(cx2, x, 1e-7)) {
            continue;
        }
        auto small = active_set(cx2, x, 1e-7).active_inequalities;
        auto big = active_set(cx2, x, 1e-1).active_inequalities;
        CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    }
}

TEST_CASE("exact criterion vanishes exactly on the identified set") {
    const auto cx3 = registry_get("cx3").model;
    for (int a = -4; a <= 4; ++a) {
        for (int b = -4; b <= 4; ++b) {
            const std::vector<Rational> q{Rational(a, 4), Rational(b, 8)};
            const bool zero = criterion_exact(cx3, q) == 0;
            const bool feas = is_feasible(cx3, v2(a / 4.0, b / 8.0), 0.0);
            CHECK(zero == feas);
        }
    }
}

TEST_CASE("projection basics") {
    const Config cfg;
    const auto half = parse_model("params theta[2] in box(-1,1)\nineq: theta1\n");
    auto r = distance_to_identified_set(half, v2(0.3, 0), cfg);
    CHECK(r.converged);
    CHECK(r.distance == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(r.nearest_feasible[0] <= 0.0);
    CHECK(std::abs(r.nearest_feasible[0]) < 1e-12);
    CHECK(std::abs(r.nearest_feasible[1]) < 1e-9);

    r = distance_to_identified_set(half, v2(-0.3, 0.2), cfg);
    CHECK(r.distance == 0.0);

    const auto fig = registry_get("fig1-left").model;
    GridOracle oracle(fig, 1e-3);
    const Vec q = v2(0, 1.1);
    r = distance_to_identified_set(fig, q, cfg);
    CHECK(r.converged);
    CHECK(std::abs(r.distance - oracle.distance(q)) <= 2e-3);
    CHECK((r.nearest_feasible - q).norm() == doctest::Approx(r.distance));
    CHECK(is_feasible_strict(fig, r.nearest_feasible, cfg));
}

TEST_CASE("projection agrees with the grid oracle on registry models") {
    const Config cfg;
    std::mt19937_64 gen(17);
    for (const auto& name : registry_names()) {
        const auto entry = registry_get(name);
        GridOracle oracle(entry.model, 1e-3);
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (int k = 0; k < 25; ++k) {
            Vec q(2);
            for (int i = 0; i < 2; ++i) {
                std::uniform_real_distribution<double> u(entry.model.lower()[i], entry.model.upper()[i]);
                q[i] = u(gen);
            }
            const auto r = distance_to_identified_set(entry.model, q, cfg);
            REQUIRE(r.converged);
            worst = std::max(worst, std::abs(r.distance - oracle.distance(q)));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        MESSAGE(name << ": worst gap " << worst << ", " << secs << " s");
        CHECK(worst <= 2e-3);
    }
}

TEST_CASE("projection distance is 1-Lipschitz") {
    const Config cfg;
    const auto m = registry_get("cx3").model;
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const Vec a = v2(u(gen), u(gen));
        const Vec b = m.clamp(a + 0.05 * v2(u(gen), u(gen)));
        const double da = distance_to_identified_set(m, a, cfg).distance;
        const double db = distance_to_identified_set(m, b, cfg).distance;
        CHECK(std::abs(da - db) <= (a - b).norm() + 2e-8);
    }
}
