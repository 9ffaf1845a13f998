#include <doctest.h>

#include <cmath>
#include <limits>

#include "cqkit/cones.hpp"
#include "cqkit/dsl.hpp"
#include "cqkit/registry.hpp"

using namespace cqkit;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

bool has_ray(const std::vector<Vec>& rays, const Vec& r) {
    for (const Vec& e : rays) {
        if ((e - r.normalized()).norm() < 1e-9) {
            return true;
        }
    }
    return false;
}

const char* kEntry =
    "params theta[2] in box(-1/4,5/4)\n"
    "eq: 2/3 - theta1 - theta2 + theta1*theta2\n"
    "ineq: theta2 - theta1*theta2 - 1/3\n"
    "ineq: theta1 - theta1*theta2 - 1/3\n";

}  // namespace

TEST_CASE("cusp: linearized cone is a line, tangent cone a ray") {
    const auto e = registry_get("cx1");
    const Vec o = v2(0, 0);
    const auto cone = linearized_cone(e.model, o, 1e-9);
    CHECK_FALSE(cone.full_space);
    CHECK(cone.generator_rays.size() == 2);
    CHECK(has_ray(cone.generator_rays, v2(0, 1)));
    CHECK(has_ray(cone.generator_rays, v2(0, -1)));
    CHECK(in_linearized_cone(cone, v2(0, 1), 1e-9));
    CHECK_FALSE(in_linearized_cone(cone, v2(1, 1), 1e-9));

    const Config cfg;
    const auto down = tangent_membership(e.model, o, v2(0, -1), cfg);
    CHECK(down.verdict == Membership::Member);
    const auto up = tangent_membership(e.model, o, v2(0, 1), cfg);
    CHECK(up.verdict == Membership::NonMember);
    CHECK_FALSE(up.trace.empty());
}

TEST_CASE("cx4: linearized cone has two rays, tangent cone one") {
    const auto e = registry_get("cx4");
    const Vec o = v2(0, 0);
    const auto cone = linearized_cone(e.model, o, 1e-9);
    CHECK(cone.generator_rays.size() == 2);
    CHECK(has_ray(cone.generator_rays, v2(-1, -1)));
    CHECK(has_ray(cone.generator_rays, v2(1, -1)));
    const Config cfg;
    CHECK(tangent_membership(e.model, o, v2(1, -1).normalized(), cfg).verdict == Membership::NonMember);
    CHECK(tangent_membership(e.model, o, v2(0, -1), cfg).verdict == Membership::Member);
}

TEST_CASE("entry game tangent ray at the upper support point") {
    const auto model = parse_model(kEntry);
    const Vec th = v2(1.0 / 3, 0.5);
    const Config cfg;
    const auto sample = tangent_cone_sample(model, th, cfg);
    const Vec ray = v2(2.0 / 3, -0.5).normalized();
    REQUIRE_FALSE(sample.members.empty());
    for (const Vec& t : sample.members) {
        const double ang = std::acos(std::clamp(t.dot(ray), -1.0, 1.0));
        CHECK(ang < 2.0 * M_PI / 180.0);
    }
}

TEST_CASE("sampled tangent directions lie in the linearized cone") {
    const Config cfg;
    for (const char* name : {"cx1", "cx3", "cx4", "cx5", "fig1-right"}) {
        CAPTURE(name);
        const auto e = registry_get(name);
        const Vec th = *e.known_support_point;
        const auto cone = linearized_cone(e.model, th, cfg.tol_active);
        const auto sample = tangent_cone_sample(e.model, th, cfg);
        CHECK(sample.tested.size() == sample.verdicts.size());
        for (const Vec& t : sample.members) {
            CHECK(in_linearized_cone(cone, t, 1e-6));
        }
        for (const Vec& t : sample.empirical) {
            CHECK(in_linearized_cone(cone, t, 1e-6));
        }
    }
}

TEST_CASE("cx5 tangent cone is the closed half-line") {
    const auto e = registry_get("cx5");
    const auto sample = tangent_cone_sample(e.model, v2(0, 0), Config{});
    CHECK(has_ray(sample.members, v2(-1, 0)));
    CHECK_FALSE(has_ray(sample.members, v2(1, 0)));
    CHECK(cone_max_inner(sample.members, v2(0, 1)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cone_max_inner") {
    CHECK(cone_max_inner({}, v2(0, 1)) == -std::numeric_limits<double>::infinity());
    CHECK(cone_max_inner({v2(1, 0), v2(0, -1)}, v2(0, 1)) == 0.0);
    CHECK(cone_max_inner({v2(0.6, -0.8)}, v2(0, 1)) == doctest::Approx(-0.8));
}
