#include <doctest.h>

#include <random>

#include "cqkit/dsl.hpp"
#include "cqkit/errors.hpp"
#include "cqkit/polynomial.hpp"

using namespace cqkit;

namespace {

Polynomial th(std::size_t d, std::size_t i) { return Polynomial::variable(d, i); }

}  // namespace

TEST_CASE("rational literals") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK(parse_rational("2") == 2);
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK(parse_rational("2.5E2") == 250);
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
    CHECK(format_rational(Rational(6, 4)) == "3/2");
    CHECK(to_double(Rational(1, 3)) == 1.0 / 3.0);
    CHECK(from_double(0.1) == Rational(mpz_class("3602879701896397"), mpz_class("36028797018963968")));
}

TEST_CASE("evaluation") {
    const Polynomial mu = th(2, 1).pow(3) - th(2, 0);
    CHECK(mu.evaluate(std::vector<double>{0.0, 1.0}) == 1.0);
    CHECK(mu.evaluate(std::vector<double>{0.0, 0.0}) == 0.0);
    const Polynomial sq = (th(2, 0) * th(2, 1)).pow(2);
    CHECK(sq.evaluate(std::vector<double>{0.5, 0.5}) == 0.0625);
    CHECK((th(2, 0) + th(2, 1)).evaluate(std::vector<double>{0.25, 0.5}) == 0.75);
    CHECK_THROWS_AS(mu.evaluate(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("gradients") {
    const Polynomial a = th(2, 1).pow(3) + th(2, 0);
    auto g = a.gradient();
    REQUIRE(g.size() == 2);
    CHECK(g[0] == Polynomial::constant(2, 1));
    CHECK(g[1] == Polynomial::constant(2, 3) * th(2, 1).pow(2));

    const Polynomial b = (th(2, 0) * th(2, 1)).pow(2);
    g = b.gradient();
    CHECK(g[0] == Polynomial::constant(2, 2) * th(2, 0) * th(2, 1).pow(2));
    CHECK(g[1] == Polynomial::constant(2, 2) * th(2, 0).pow(2) * th(2, 1));

    for (const Polynomial& z : Polynomial::constant(2, 5).gradient()) {
        CHECK(z.is_zero());
    }
}

TEST_CASE("no zero terms are stored") {
    Polynomial p = th(2, 0) - th(2, 0);
    CHECK(p.is_zero());
    p.add_term({1, 1}, Rational(2));
    p.add_term({1, 1}, Rational(-2));
    CHECK(p.terms().empty());
}

TEST_CASE("central differences agree with symbolic gradients") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + gen() % 4;
        Polynomial p(d);
        for (int t = 0; t < 6; ++t) {
            Exponent e(d, 0);
            unsigned budget = gen() % 5;
            for (unsigned k = 0; k < budget; ++k) {
                e[gen() % d] += 1;
            }
            p.add_term(e, Rational(coef(gen), 1 + gen() % 4));
        }
        const auto grad = p.gradient();
        std::vector<double> x(d);
        for (auto& v : x) {
            v = pt(gen);
        }
        for (std::size_t i = 0; i < d; ++i) {
            auto xp = x, xm = x;
            xp[i] += 1e-5;
            xm[i] -= 1e-5;
            const double fd = (p.evaluate(xp) - p.evaluate(xm)) / 2e-5;
            CHECK(std::abs(fd - grad[i].evaluate(x)) <= 1e-6);
        }
    }
}

TEST_CASE("parse the first counterexample") {
    const auto m = parse_model("params theta[2] in box(-1,1); ineq: theta2^3 - theta1; ineq: theta2^3 + theta1");
    CHECK(m.dim() == 2);
    CHECK(m.num_ineq() == 2);
    CHECK(m.num_eq() == 0);
    CHECK(m.inequalities()[0] == th(2, 1).pow(3) - th(2, 0));
    CHECK(m.gradient(1)[1] == Polynomial::constant(2, 3) * th(2, 1).pow(2));
    CHECK_FALSE(m.direction_exact().has_value());
}

TEST_CASE("single constraint model") {
    const auto m = parse_model("params theta[1] in box(-1,1)\nineq: theta1\n");
    CHECK(m.dim() == 1);
    CHECK(m.num_ineq() == 1);
    CHECK(m.inequalities()[0] == th(1, 0));
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_model("params theta[1] in box(-1,1)\nineq theta1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.token() == 2);
        CHECK(e.column() == 6);
    }
    CHECK_THROWS_AS(parse_model("params theta[2] in box(-1,1)\nineq: theta3\n"), DimensionError);
    CHECK_THROWS_AS(parse_model("params theta[2] in box(-1,1)\n# nothing\n"), ValidationError);
    CHECK_THROWS_AS(parse_model(""), ParseError);
    CHECK_THROWS_AS(parse_model("params theta[2] in box(-1,1)\ndirection: (0,1)\ndirection: (1,0)\nineq: theta1"),
                    ParseError);
    CHECK_THROWS_AS(parse_model("params theta[2] in box(-1,1)\nineq: theta1 $ 2"), ParseError);
}

TEST_CASE("comments, equalities, direction, rationals") {
    const auto m = parse_model(
        "# entry game\n"
        "params theta[2] in box(-0.25,1.25)\n"
        "eq: 2/3 - theta1 - theta2 + theta1*theta2   # cond 1\n"
        "ineq: theta2 - theta1*theta2 - 1/3\n"
        "direction: (0, 1)\n");
    CHECK(m.num_eq() == 1);
    CHECK(m.num_ineq() == 1);
    CHECK(m.lower_exact()[0] == Rational(-1, 4));
    REQUIRE(m.default_direction().has_value());
    CHECK((*m.default_direction())[1] == 1.0);
    CHECK(m.equalities()[0].evaluate(std::vector<double>{0.0, 0.0}) == to_double(Rational(2, 3)));
}

TEST_CASE("round trip") {
    const char* texts[] = {
        "params theta[2] in box(-1,1); ineq: theta1^2*theta2 + theta1^4; ineq: theta2",
        "params theta[3] in box(-2,3/2); eq: -theta3 + 7/5*theta1*theta2^2 - 2; direction: (1,-2,1/3)",
        "params theta[2] in box(-1,1); ineq: 0*theta1 + 0",
    };
    for (const char* t : texts) {
        const auto m = parse_model(t);
        const std::string s = serialize_model(m);
        const auto again = parse_model(s);
        CHECK(again == m);
        CHECK(serialize_model(again) == s);
        CHECK(model_fingerprint(again) == model_fingerprint(m));
    }
    CHECK(serialize_model(parse_model(texts[0])) ==
          "params theta[2] in box(-1,1)\nineq: theta1^4 + theta1^2*theta2\nineq: theta2\n");
}
