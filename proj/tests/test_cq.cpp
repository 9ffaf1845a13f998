#include <doctest.h>

#include "cqkit/cones.hpp"
#include "cqkit/cq.hpp"
#include "cqkit/dsl.hpp"
#include "cqkit/registry.hpp"
#include "cqkit/sampling.hpp"

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

TEST_CASE("LICQ") {
    const Config cfg;
    const auto entry = parse_model(kEntry);
    CHECK(check_licq(entry, v2(1.0 / 3, 0.5), cfg).status == Status::Holds);
    CHECK(check_licq(registry_get("cx2").model, v2(0, 0), cfg).status == Status::Fails);
    CHECK(check_licq(registry_get("cx1").model, v2(0, 0), cfg).status == Status::Fails);
    const auto two = parse_model("params theta[2] in box(-1,1)\nineq: theta1\nineq: theta2\n");
    const auto v = check_licq(two, v2(0, 0), cfg);
    CHECK(v.status == Status::Holds);
    CHECK(v.evidence["singular_values"].size() == 2);
    // positive rescaling of a row leaves the verdict alone
    const auto scaled = parse_model("params theta[2] in box(-1,1)\nineq: 1000*theta1\nineq: 1/7*theta2\n");
    CHECK(check_licq(scaled, v2(0, 0), cfg).status == Status::Holds);
}

TEST_CASE("MFCQ") {
    const Config cfg;
    const auto cx1 = check_mfcq(registry_get("cx1").model, v2(0, 0), cfg);
    CHECK(cx1.status == Status::Fails);
    CHECK(cx1.evidence["s_star"].get<double>() == 0.0);

    const auto half = parse_model("params theta[2] in box(-1,1)\nineq: theta2\n");
    const auto prog = mfcq_program(half, v2(0, 0), cfg);
    CHECK(prog.s_star == doctest::Approx(1.0));
    CHECK(prog.witness[1] == doctest::Approx(-1.0));
    CHECK(check_mfcq(half, v2(0, 0), cfg).status == Status::Holds);

    const auto entry = parse_model(kEntry);
    CHECK(check_mfcq(entry, v2(1.0 / 3, 0.5), cfg).status == Status::Holds);
    // two equalities with parallel gradients break stage 1
    const auto par = parse_model("params theta[2] in box(-1,1)\neq: theta1\neq: 2*theta1\n");
    CHECK(check_mfcq(par, v2(0, 0), cfg).status == Status::Fails);

    const auto interior = parse_model("params theta[2] in box(-1,1)\nineq: theta1 - 1/2\n");
    CHECK(check_mfcq(interior, v2(0, 0), cfg).status == Status::Holds);

    for (std::string name : {"cx2", "cx3", "cx4", "fig1-left", "fig1-right"}) {
        CAPTURE(name);
        CHECK(check_mfcq(registry_get(name).model, *registry_get(name).known_support_point, cfg).status ==
              Status::Fails);
    }
    CHECK(check_mfcq(registry_get("cx5").model, v2(0, 0), cfg).status == Status::Holds);
    CHECK(check_mfcq(registry_get("smooth-max").model, v2(0, 1), cfg).status == Status::Holds);
}

TEST_CASE("MFCQ optimum agrees with the angle scan") {
    const Config cfg;
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::string src = "params theta[2] in box(-1,1)\n";
        const int rows = 1 + trial % 4;
        for (int j = 0; j < rows; ++j) {
            const auto a = rng.integer(-5, 5), b = rng.integer(-5, 5);
            src += "ineq: " + std::to_string(a) + "/5*theta1 " + (b < 0 ? "- " : "+ ") + std::to_string(std::abs(b)) +
                   "/5*theta2\n";
        }
        const auto model = parse_model(src);
        const auto cone = linearized_cone(model, v2(0, 0), cfg.tol_active);
        const auto prog = mfcq_program(model, v2(0, 0), cfg);
        CAPTURE(src);
        CHECK(std::abs(prog.s_star - mfcq_bruteforce(cone.rows)) < 1e-3);
    }
}

TEST_CASE("ACQ") {
    const Config cfg;
    CHECK(check_acq(registry_get("cx3").model, v2(0, 0), cfg).status == Status::Holds);
    CHECK(check_acq(registry_get("cx2").model, v2(0, 0), cfg).status == Status::Holds);
    const auto cx4 = check_acq(registry_get("cx4").model, v2(0, 0), cfg);
    CHECK(cx4.status == Status::Fails);
    bool saw = false;
    for (const auto& nm : cx4.evidence["non_members"]) {
        const auto t = nm["direction"].get<std::vector<double>>();
        saw = saw || (std::abs(t[0] - M_SQRT1_2) < 1e-9 && std::abs(t[1] + M_SQRT1_2) < 1e-9);
    }
    CHECK(saw);
    CHECK(check_acq(registry_get("cx1").model, v2(0, 0), cfg).status == Status::Fails);
    CHECK(check_acq(registry_get("fig1-left").model, v2(0, 1), cfg).status == Status::Fails);
    CHECK(check_acq(parse_model(kEntry), v2(1.0 / 3, 0.5), cfg).status == Status::Holds);
    CHECK(check_acq(registry_get("smooth-max").model, v2(0, 1), cfg).status == Status::Holds);
}
