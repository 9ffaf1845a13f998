#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cqkit/assumptions.hpp"
#include "cqkit/cq.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/examples.hpp"
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

// pairwise line intersections kept when inside every constraint
std::vector<Vec> brute_vertices(const Mat& D, const Vec& b) {
    std::vector<Vec> out;
    for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < D.rows(); ++j) {
            Eigen::Matrix2d a;
            a << D.row(i), D.row(j);
            if (std::abs(a.determinant()) < 1e-12) {
                continue;
            }
            const Vec x = a.inverse() * Eigen::Vector2d(b[i], b[j]);
            if (((D * x - b).array() <= 1e-9).all()) {
                bool dup = false;
                for (const Vec& v : out) {
                    dup = dup || (v - x).norm() < 1e-9;
                }
                if (!dup) {
                    out.push_back(x);
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("registry entries") {
    const auto cx1 = registry_get("cx1");
    CHECK(cx1.model.num_ineq() == 2);
    CHECK(cx1.expected.at(Node::A7) == Status::Fails);
    const auto f = registry_get("fig1-left");
    CHECK((*f.known_support_point - v2(0, 1)).norm() == 0.0);
    const auto sm = registry_get("smooth-max");
    CHECK(sm.expected.at(Node::A4) == Status::Fails);
    CHECK(sm.expected.at(Node::A3) == Status::Holds);
    CHECK_THROWS_AS(registry_get("nonsense"), ValidationError);
    for (const auto& name : registry_names()) {
        const auto e = registry_get(name);
        CHECK(is_feasible(e.model, *e.known_support_point, 1e-12));
    }
}

TEST_CASE("interval regression: derived instance") {
    const auto im = build_interval_regression(hexagon_spec());
    CHECK(im.model.num_ineq() == 6);
    CHECK(im.conditions.validated());
    const auto brute = brute_vertices(im.D, im.b);
    CHECK(brute.size() == im.vertices.size());
    for (const Vec& v : brute) {
        bool found = false;
        for (const Vec& w : im.vertices) {
            found = found || (v - w).norm() < 1e-12;
        }
        CHECK(found);
    }
    // lower and upper rows antiparallel with positive scale ratio
    for (Eigen::Index r = 0; r < 3; ++r) {
        const Vec lo = im.D.row(r), up = im.D.row(r + 3);
        CHECK(std::abs(lo.normalized().dot(up.normalized()) + 1.0) < 1e-12);
    }
    const double s = interval_sigma(1.0 / 3, 0.0, 1.0);
    CHECK(s == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("interval regression: single cell is a strip") {
    IntervalRegressionSpec spec;
    IntervalCell c;
    c.z = v2(1, 0.5);
    c.pi = 1.0;
    c.mean_w0 = 0;
    c.mean_w1 = 1;
    c.var_w0 = c.var_w1 = 1;
    spec.cells = {c};
    const auto im = build_interval_regression(spec);
    CHECK(im.vertices.empty());
    CHECK_FALSE(im.conditions.k_at_least_d);
    CHECK(is_feasible(im.model, v2(0.5, 0.0), 0.0));
    CHECK(is_feasible(im.model, v2(-0.5, 2.0), 0.0));
    CHECK_FALSE(is_feasible(im.model, v2(2.0, 0.0), 0.0));
}

TEST_CASE("interval regression: validation") {
    auto spec = hexagon_spec();
    spec.cells[1].z = spec.cells[0].z;
    CHECK_FALSE(build_interval_regression(spec).conditions.subsets_independent);
    spec = hexagon_spec();
    spec.cells[2].mean_w1 = spec.cells[2].mean_w0;
    CHECK_THROWS_AS(build_interval_regression(spec), ValidationError);
    spec = hexagon_spec();
    spec.cells[0].pi = 0.5;
    CHECK_THROWS_AS(build_interval_regression(spec), ValidationError);
    spec = hexagon_spec();
    spec.cells[0].z[0] = 2.0;
    CHECK_THROWS_AS(build_interval_regression(spec), ValidationError);
}

TEST_CASE("face classification") {
    const auto im = build_interval_regression(hexagon_spec());
    const auto facet = classify_support_face(im, v2(1, 0));
    CHECK(facet.kind == FaceKind::Facet);
    CHECK(facet.predicted.at(Node::MFCQ) == Status::Holds);
    const auto vert = classify_support_face(im, v2(0.6, 0.8));
    CHECK(vert.kind == FaceKind::Vertex);
    CHECK(vert.active_rows == 2);
    CHECK(vert.predicted.at(Node::LICQ) == Status::Holds);
    CHECK(vert.value == doctest::Approx(0.7));
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double a = 2 * M_PI * rng.uniform();
        CHECK(classify_support_face(im, v2(std::cos(a), std::sin(a))).kind != FaceKind::LFace);
    }
    auto bad = hexagon_spec();
    bad.cells[1].z = bad.cells[0].z;
    CHECK_THROWS_AS(classify_support_face(build_interval_regression(bad), v2(0, 1)), ValidationError);
}

TEST_CASE("face predictions agree with the checkers") {
    const Config cfg;
    const auto im = build_interval_regression(hexagon_spec());
    for (const Vec& p : {v2(1, 0), v2(0.6, 0.8), v2(1, 1).normalized(), v2(-0.3, -0.9).normalized()}) {
        CAPTURE(p.transpose());
        const auto face = classify_support_face(im, p);
        const auto sol = solve_support(im.model, p, cfg);
        CHECK(sol.value == doctest::Approx(face.value).epsilon(1e-8));
        // a relative-interior point has the fewest active rows
        const SupportPoint* pt = &sol.points[0];
        for (const auto& sp : sol.points) {
            if (sp.active.all().size() < pt->active.all().size()) {
                pt = &sp;
            }
        }
        for (const auto& [node, status] : face.predicted) {
            const auto got = node == Node::LICQ ? check_licq(im.model, pt->point, cfg) : check_mfcq(im.model, pt->point, cfg);
            CHECK(got.status == status);
        }
    }
}

TEST_CASE("ingest interval data") {
    const Vec theta0 = v2(0.3, -0.2);
    Rng rng(5);
    std::vector<IntervalRow> rows;
    for (double z2 : {-1.0, 0.0, 1.0}) {
        for (int i = 0; i < 100; ++i) {
            const Vec z = v2(1, z2);
            const double w = z.dot(theta0) + 0.05 * (rng.uniform() - 0.5);
            rows.push_back({w - 0.2 - 0.6 * rng.uniform(), w + 0.2 + 0.6 * rng.uniform(), z});
        }
    }
    const auto spec = ingest_interval_data(rows);
    CHECK(spec.cells.size() == 3);
    CHECK(spec.cells[0].pi == doctest::Approx(1.0 / 3));
    const auto im = build_interval_regression(spec);
    CHECK(is_feasible(im.model, theta0, 0.0));

    std::vector<IntervalRow> flat;
    for (double z2 : {-1.0, 1.0}) {
        for (int i = 0; i < 4; ++i) {
            const Vec z = v2(1, z2);
            flat.push_back({z.dot(theta0), z.dot(theta0), z});
        }
    }
    CHECK_THROWS_AS(ingest_interval_data(flat), ValidationError);
    CHECK_THROWS_AS(ingest_interval_data({{0.0, 1.0, v2(1, 0)}}), ValidationError);
    CHECK_THROWS_AS(ingest_interval_data({{1.0, 0.0, v2(1, 0)}, {0.0, 1.0, v2(1, 0)}}), ValidationError);
}

TEST_CASE("CSV reader") {
    std::istringstream ok("w0,w1,z1,z2\n0,1,1,-1\n0.5,1.5,1,0\n");
    const auto rows = read_interval_csv(ok);
    CHECK(rows.size() == 2);
    CHECK(rows[1].z[1] == 0.0);
    std::istringstream swapped("w0,w1,z1,z2\n0,1,1,-1\n2,1,1,0\n");
    try {
        read_interval_csv(swapped);
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS(read_interval_csv(empty), ValidationError);
    std::istringstream header_only("w0,w1,z1\n");
    CHECK_THROWS_AS(read_interval_csv(header_only), ValidationError);
}

TEST_CASE("entry game") {
    const EntryGameSpec third{Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    const auto model = build_entry_game(third);
    CHECK(model.num_eq() == 1);
    CHECK(model.num_ineq() == 2);
    const Vec th = *entry_game_support_point(third, v2(0, 1));
    CHECK((th - v2(1.0 / 3, 0.5)).norm() < 1e-15);
    CHECK(is_feasible(model, th, 1e-14));
    const Vec ray = entry_game_tangent_ray(third);
    CHECK((ray - v2(2.0 / 3, -0.5).normalized()).norm() < 1e-15);
    CHECK_FALSE(entry_game_support_point(third, v2(1, 1)).has_value());

    const EntryGameSpec other{Rational(1, 2), Rational(1, 4), Rational(1, 4)};
    const Vec th2 = *entry_game_support_point(other, v2(0, 1));
    CHECK((th2 - v2(0.25, 1.0 / 3)).norm() < 1e-15);
    const auto sol = solve_support(build_entry_game(other), v2(0, 1), Config{});
    CHECK((sol.points[0].point - th2).norm() < 1e-6);
    const Vec side = *entry_game_support_point(other, v2(1, 0));
    const auto sol2 = solve_support(build_entry_game(other), v2(1, 0), Config{});
    CHECK((sol2.points[0].point - side).norm() < 1e-6);

    CHECK_THROWS_AS(build_entry_game({Rational(1, 2), Rational(1, 2), Rational(1, 2)}), ValidationError);
    CHECK_THROWS_AS(build_entry_game({Rational(0), Rational(1, 2), Rational(1, 2)}), ValidationError);
    EntryGameSpec bounded = third;
    bounded.explicit_bounds = true;
    CHECK(build_entry_game(bounded).num_ineq() == 6);
}
