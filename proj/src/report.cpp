#include "cqkit/report.hpp"

#include <chrono>
#include <sstream>

#include "cqkit/assumptions.hpp"
#include "cqkit/cones.hpp"
#include "cqkit/cq.hpp"
#include "cqkit/dsl.hpp"

namespace cqkit {

namespace {

nlohmann::json vec_json(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Status span_status(const MomentModel& model, const Vec& theta, const Config& cfg, nlohmann::json& ev) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    const auto sv = singular_values(cone.rows);
    ev = {{"rows", cone.rows.rows()}, {"singular_values", sv}};
    const auto d = model.dim();
    if (static_cast<std::size_t>(cone.rows.rows()) < d || sv.empty() || sv.front() == 0.0) {
        return Status::Fails;
    }
    return sv[d - 1] >= cfg.licq_tol * sv.front() ? Status::Holds : Status::Fails;
}

}  // namespace

bool CheckReport::audit_clean() const {
    return violation_count() == 0;
}

std::size_t CheckReport::violation_count() const {
    std::size_t n = 0;
    for (const auto& p : points) {
        n += p.violations.size();
    }
    return n;
}

std::size_t CheckReport::closest_point(const Vec& target) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if ((points[i].point - target).norm() < (points[best].point - target).norm()) {
            best = i;
        }
    }
    return best;
}

CheckReport run_check(const MomentModel& model, const Vec& direction, const Config& cfg, const CheckOptions& opts) {
    CheckReport rep;
    Stopwatch sw;
    rep.fingerprint = model_fingerprint(model);
    rep.direction = direction.normalized();
    rep.support = solve_support(model, rep.direction, cfg);
    rep.timings["support"] = sw.lap();

    nlohmann::json point_timings = nlohmann::json::array();
    for (const SupportPoint& sp : rep.support.points) {
        PointReport pr;
        const Vec& th = sp.point;
        pr.point = th;
        pr.active_count = sp.active.all().size();
        nlohmann::json t;
        auto put = [&](Node n, Status s, nlohmann::json ev, const char* key) {
            pr.nodes[n] = s;
            pr.evidence[std::string(to_string(n))] = {{"status", to_string(s)}, {"evidence", std::move(ev)}};
            t[key] = sw.lap();
        };
        const CqVerdict licq = check_licq(model, th, cfg);
        put(Node::LICQ, licq.status, licq.evidence, "licq");
        const CqVerdict mfcq = check_mfcq(model, th, cfg);
        put(Node::MFCQ, mfcq.status, mfcq.evidence, "mfcq");
        const Status noeq = model.num_eq() > 0 ? Status::Fails : mfcq.status;
        put(Node::MfcqNoEq, noeq, {{"equalities", model.num_eq()}}, "mfcq_noeq");
        const CqVerdict acq = check_acq(model, th, cfg);
        put(Node::ACQ, acq.status, acq.evidence, "acq");
        nlohmann::json span_ev;
        const Status span = span_status(model, th, cfg, span_ev);
        put(Node::SpanD, span, span_ev, "span_d");

        const auto a2 = check_degeneracy(model, rep.direction, th, cfg);
        put(Node::A2, a2.status, a2.evidence, "a2");
        const auto a3 = check_minorant_global(model, th, cfg);
        put(Node::A3, a3.status, a3.evidence, "a3");
        const auto a4 = check_minorant_support(model, rep.support, th, cfg);
        put(Node::A4, a4.status, a4.evidence, "a4");
        const auto a5 = check_cone_pointy(model, rep.direction, th, cfg);
        put(Node::A5, a5.status, a5.evidence, "a5");
        const auto a6 = check_descent(model, th, cfg);
        put(Node::A6, a6.status, a6.evidence, "a6");
        const auto a7 = check_ascent(model, rep.direction, th, cfg);
        put(Node::A7, a7.status, a7.evidence, "a7");

        if (opts.variant_cross_checks) {
            const auto a5f = check_cone_pointy_finite(model, rep.direction, th, cfg);
            const auto a7o = check_ascent_original(model, rep.direction, th, cfg);
            pr.cross_checks = {
                {"A5_finite_eta", {{"status", to_string(a5f.status)}, {"agrees", a5f.status == a5.status}, {"evidence", a5f.evidence}}},
                {"A7_original", {{"status", to_string(a7o.status)}, {"agrees", a7o.status == a7.status}, {"evidence", a7o.evidence}}},
            };
            t["cross_checks"] = sw.lap();
        }
        pr.violations = audit(pr.nodes, {pr.active_count, model.dim()});
        point_timings.push_back(t);
        rep.points.push_back(std::move(pr));
    }
    rep.timings["points"] = point_timings;
    return rep;
}

nlohmann::json report_json(const CheckReport& rep, const Config& cfg) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["tool_version"] = kToolVersion;
    j["model_fingerprint"] = rep.fingerprint;
    j["direction"] = vec_json(rep.direction);

    const SupportSolution& s = rep.support;
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& pc : s.pieces) {
        pieces.push_back({{"a", vec_json(pc.a)}, {"b", vec_json(pc.b)}});
    }
    j["support"] = {{"value", s.value},
                    {"multiplicity", to_string(s.multiplicity)},
                    {"pieces", pieces},
                    {"warnings", s.warnings},
                    {"hyperplane", {{"p", vec_json(s.direction)}, {"offset", s.value}}}};

    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : rep.points) {
        nlohmann::json verdicts;
        for (const auto& [n, st] : p.nodes) {
            verdicts[std::string(to_string(n))] = to_string(st);
        }
        nlohmann::json viol = nlohmann::json::array();
        for (const auto& v : p.violations) {
            viol.push_back(v.rule);
        }
        pts.push_back({{"theta", vec_json(p.point)},
                       {"active_count", p.active_count},
                       {"verdicts", verdicts},
                       {"evidence", p.evidence},
                       {"variant_cross_checks", p.cross_checks},
                       {"audit", {{"clean", p.violations.empty()}, {"violations", viol}}}});
    }
    j["points"] = pts;
    j["audit"] = {{"clean", rep.audit_clean()}, {"violations", rep.violation_count()}};
    j["config"] = cfg;
    j["timings"] = rep.timings;
    return j;
}

std::vector<std::string> golden_mismatches(const NodeStatus& got, const NodeStatus& expected) {
    std::vector<std::string> out;
    for (const auto& [n, want] : expected) {
        const auto it = got.find(n);
        const Status have = it == got.end() ? Status::Inconclusive : it->second;
        if (have != want) {
            out.push_back(std::string(to_string(n)) + ": expected " + std::string(to_string(want)) + ", got " +
                          std::string(to_string(have)));
        }
    }
    return out;
}

std::string report_text(const CheckReport& rep) {
    std::ostringstream os;
    os << "model " << rep.fingerprint << "  direction (";
    for (Eigen::Index i = 0; i < rep.direction.size(); ++i) {
        os << (i ? ", " : "") << rep.direction[i];
    }
    os << ")\n";
    os << "support value " << rep.support.value << "  (" << to_string(rep.support.multiplicity) << ")\n";
    for (const auto& w : rep.support.warnings) {
        os << "  warning: " << w << "\n";
    }
    for (const auto& p : rep.points) {
        os << "theta* = (";
        for (Eigen::Index i = 0; i < p.point.size(); ++i) {
            os << (i ? ", " : "") << p.point[i];
        }
        os << ")  active " << p.active_count << "\n";
        for (const auto& [n, st] : p.nodes) {
            os << "  " << to_string(n) << ": " << to_string(st) << "\n";
        }
        if (!p.cross_checks.is_null()) {
            for (const auto& [k, v] : p.cross_checks.items()) {
                os << "  [" << k << "] " << v["status"].get<std::string>()
                   << (v["agrees"].get<bool>() ? "" : "  (disagrees)") << "\n";
            }
        }
        if (p.violations.empty()) {
            os << "  audit: clean\n";
        } else {
            for (const auto& v : p.violations) {
                os << "  audit violation: " << v.rule << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace cqkit
