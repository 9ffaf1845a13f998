#include "cqkit/registry.hpp"

#include "cqkit/errors.hpp"

namespace cqkit {

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Polynomial t1() { return Polynomial::variable(2, 0); }
Polynomial t2() { return Polynomial::variable(2, 1); }
Polynomial c2(long n) { return Polynomial::constant(2, n); }

MomentModel unit_box(std::vector<Polynomial> ineq, Rational half_width = 1) {
    return MomentModel(2, {-half_width, -half_width}, {half_width, half_width}, std::move(ineq), {},
                       std::vector<Rational>{0, 1});
}

RegistryEntry make(const std::string& name) {
    const Vec up = vec2(0.0, 1.0);
    const Vec origin = vec2(0.0, 0.0);
    if (name == "cx1") {
        return {name, unit_box({t2().pow(3) - t1(), t2().pow(3) + t1()}), up, origin,
                {{Node::A5, Status::Holds},
                 {Node::A4, Status::Holds},
                 {Node::A7, Status::Fails},
                 {Node::ACQ, Status::Fails},
                 {Node::MFCQ, Status::Fails},
                 {Node::LICQ, Status::Fails}},
                "tightness example 1: cusp, linearized cone is a line"};
    }
    if (name == "cx2") {
        return {name, unit_box({t2().pow(3) - t1(), t2().pow(3) + t1(), t2()}), up, origin,
                {{Node::A3, Status::Holds}, {Node::ACQ, Status::Holds}, {Node::MFCQ, Status::Fails}},
                "tightness example 2: cusp capped by a third constraint"};
    }
    if (name == "cx3") {
        return {name, unit_box({t1().pow(2) * t2() + t1().pow(4), t2()}), up, origin,
                {{Node::ACQ, Status::Holds}, {Node::A3, Status::Fails}},
                "tightness example 3: quartic contact along the first axis"};
    }
    if (name == "cx4") {
        return {name, unit_box({-t1() + t2(), t1() + t2(), (t1() * t2()).pow(2)}), up, origin,
                {{Node::A7, Status::Holds}, {Node::ACQ, Status::Fails}},
                "tightness example 4: wedge cut down to a ray"};
    }
    if (name == "cx5") {
        return {name, unit_box({t2(), t1() + t2()}), up, origin,
                {{Node::A4, Status::Holds}, {Node::A7, Status::Fails}, {Node::A5, Status::Fails}},
                "tightness example 5: support set is a segment"};
    }
    if (name == "fig1-left" || name == "fig1-right") {
        const Polynomial cube = (t2() - c2(1)).pow(3);
        std::vector<Polynomial> ineq{cube + t1(), cube - t1()};
        NodeStatus expected{{Node::ACQ, Status::Fails}, {Node::MFCQ, Status::Fails}};
        if (name == "fig1-right") {
            ineq.push_back(t2() - c2(1));
            expected = {{Node::A3, Status::Holds}, {Node::MFCQ, Status::Fails}};
        }
        return {name, unit_box(std::move(ineq), 2), up, vec2(0.0, 1.0), expected,
                name == "fig1-left" ? "irregular support point: two cubic constraints meeting in a cusp"
                                    : "irregular support point: cusp capped by a linear constraint"};
    }
    if (name == "smooth-max") {
        return {name, unit_box({t1().pow(2) + t2().pow(2) - c2(1)}, 2), up, vec2(0.0, 1.0),
                {{Node::A4, Status::Fails}, {Node::A3, Status::Holds}},
                "smooth maximum: unit disk"};
    }
    throw ValidationError("unknown registry model '" + name + "'");
}

}  // namespace

const std::vector<std::string>& registry_names() {
    static const std::vector<std::string> names{"cx1",       "cx2",        "cx3",       "cx4", "cx5",
                                                "fig1-left", "fig1-right", "smooth-max"};
    return names;
}

RegistryEntry registry_get(const std::string& name) {
    return make(name);
}

}  // namespace cqkit
