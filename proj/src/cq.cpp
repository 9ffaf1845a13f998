#include "cqkit/cq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "cqkit/cones.hpp"
#include "cqkit/simplex.hpp"

namespace cqkit {

const char* to_string(CqKind k) {
    switch (k) {
    case CqKind::LICQ:
        return "LICQ";
    case CqKind::MFCQ:
        return "MFCQ";
    case CqKind::ACQ:
        return "ACQ";
    }
    return "?";
}

namespace {

nlohmann::json vec_json(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

bool full_row_rank(const std::vector<double>& sv, std::size_t rows, std::size_t d, double tol) {
    if (rows == 0) {
        return true;
    }
    if (rows > d || sv.empty() || sv.front() == 0.0) {
        return false;
    }
    return sv.back() >= tol * sv.front();
}

}  // namespace

std::vector<double> singular_values(const Mat& rows) {
    if (rows.rows() == 0 || rows.cols() == 0) {
        return {};
    }
    const Eigen::JacobiSVD<Mat> svd(rows);
    const Vec s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    // a wide matrix has min(rows, cols) values; the missing ones are zero
    out.resize(static_cast<std::size_t>(rows.rows()) > out.size() ? static_cast<std::size_t>(rows.rows()) : out.size(),
               0.0);
    return out;
}

MfcqProgram mfcq_program(const MomentModel& model, const Vec& theta, const Config& cfg) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    const auto d = model.dim();
    MfcqProgram out;
    out.witness = Vec::Zero(static_cast<Eigen::Index>(d));

    std::vector<Eigen::Index> ineq, eq;
    for (Eigen::Index k = 0; k < cone.rows.rows(); ++k) {
        (cone.equality[static_cast<std::size_t>(k)] ? eq : ineq).push_back(k);
    }
    Mat eq_rows(static_cast<Eigen::Index>(eq.size()), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < eq.size(); ++k) {
        eq_rows.row(static_cast<Eigen::Index>(k)) = cone.rows.row(eq[k]);
    }
    out.equality_singular_values = singular_values(eq_rows);
    out.stage1 = full_row_rank(out.equality_singular_values, eq.size(), d, cfg.licq_tol);

    if (ineq.empty()) {
        out.bounded = false;
        out.s_star = std::numeric_limits<double>::infinity();
        return out;
    }

    // variables (t_1..t_d, s)
    LinearProgram<Rational> lp;
    lp.objective.assign(d + 1, Rational(0));
    lp.objective[d] = 1;
    for (Eigen::Index k : ineq) {
        std::vector<Rational> row(d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            row[i] = from_double(cone.rows(k, static_cast<Eigen::Index>(i)));
        }
        row[d] = 1;
        lp.ineq_rows.push_back(std::move(row));
        lp.ineq_rhs.emplace_back(0);
    }
    for (Eigen::Index k : eq) {
        std::vector<Rational> row(d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            row[i] = from_double(cone.rows(k, static_cast<Eigen::Index>(i)));
        }
        row[d] = 0;
        lp.eq_rows.push_back(std::move(row));
        lp.eq_rhs.emplace_back(0);
    }
    lp.lower.assign(d + 1, Rational(-1));
    lp.lower[d] = 0;
    lp.upper.assign(d + 1, Rational(1));
    lp.upper[d] = std::nullopt;
    const LpResult<Rational> res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) {
        out.bounded = res.status != LpStatus::Unbounded;
        out.s_star = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.s_star = to_double(res.value);
    for (std::size_t i = 0; i < d; ++i) {
        out.witness[static_cast<Eigen::Index>(i)] = to_double(res.x[i]);
    }
    return out;
}

double mfcq_bruteforce(const Mat& rows, int angles) {
    double best = 0.0;
    for (int k = 0; k < angles; ++k) {
        const double a = 2.0 * std::numbers::pi * k / angles;
        Vec t(2);
        t << std::cos(a), std::sin(a);
        t /= t.cwiseAbs().maxCoeff();
        double worst = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < rows.rows(); ++j) {
            worst = std::min(worst, -rows.row(j).dot(t));
        }
        best = std::max(best, worst);
    }
    return best;
}

CqVerdict check_licq(const MomentModel& model, const Vec& theta, const Config& cfg) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    CqVerdict out{CqKind::LICQ, Status::Fails, {}};
    const auto sv = singular_values(cone.rows);
    out.evidence["rows"] = cone.rows.rows();
    out.evidence["singular_values"] = sv;
    if (full_row_rank(sv, static_cast<std::size_t>(cone.rows.rows()), model.dim(), cfg.licq_tol)) {
        out.status = Status::Holds;
    }
    return out;
}

CqVerdict check_mfcq(const MomentModel& model, const Vec& theta, const Config& cfg) {
    const MfcqProgram prog = mfcq_program(model, theta, cfg);
    CqVerdict out{CqKind::MFCQ, Status::Inconclusive, {}};
    out.evidence["stage1"] = prog.stage1;
    out.evidence["equality_singular_values"] = prog.equality_singular_values;
    if (prog.bounded && !std::isnan(prog.s_star)) {
        out.evidence["s_star"] = prog.s_star;
    } else {
        out.evidence["s_star"] = nullptr;
    }
    out.evidence["witness"] = vec_json(prog.witness);
    if (!prog.stage1) {
        out.status = Status::Fails;
    } else if (!prog.bounded || prog.s_star >= cfg.mfcq_tol) {
        out.status = Status::Holds;
    } else if (std::isnan(prog.s_star)) {
        out.evidence["blocking"] = "linear program failed";
    } else if (prog.s_star <= cfg.zero_tol) {
        out.status = Status::Fails;
    } else {
        out.evidence["blocking"] = "s* below the strictness threshold";
    }
    return out;
}

namespace {

std::vector<Vec> acq_directions(const ConeDescription& cone, const Config& cfg) {
    std::vector<Vec> out;
    const auto d = cone.base_point.size();
    if (d != 2) {
        for (const Vec& t : linearized_directions(cone, cfg)) {
            if (static_cast<int>(out.size()) >= cfg.acq_interior * static_cast<int>(d)) {
                break;
            }
            out.push_back(t);
        }
        return out;
    }
    out = cone.generator_rays;
    const auto arcs = linearized_arcs(cone, cfg);
    double total = 0.0;
    for (const auto& a : arcs) {
        total += a.second;
    }
    if (total <= 0.0) {
        return out;
    }
    for (const auto& [start, len] : arcs) {
        const int n = std::max(len > 0.0 ? 1 : 0, static_cast<int>(std::lround(cfg.acq_interior * len / total)));
        for (int i = 0; i < n; ++i) {
            const double a = start + len * (i + 0.5) / n;
            Vec t(2);
            t << std::cos(a), std::sin(a);
            if (in_linearized_cone(cone, t, cfg.cone_tol)) {
                out.push_back(t);
            }
        }
    }
    return out;
}

}  // namespace

CqVerdict check_acq(const MomentModel& model, const Vec& theta, const Config& cfg) {
    const ConeDescription cone = linearized_cone(model, theta, cfg.tol_active);
    CqVerdict out{CqKind::ACQ, Status::Holds, {}};
    const std::vector<Vec> dirs = acq_directions(cone, cfg);
    nlohmann::json non_members = nlohmann::json::array();
    nlohmann::json open = nlohmann::json::array();
    for (const Vec& t : dirs) {
        const MembershipResult m = tangent_membership(model, theta, t, cfg);
        if (m.verdict == Membership::NonMember) {
            non_members.push_back({{"direction", vec_json(t)}, {"trace", m.trace}});
        } else if (m.verdict == Membership::Inconclusive) {
            open.push_back({{"direction", vec_json(t)}, {"trace", m.trace}});
        }
    }
    out.evidence["tested"] = dirs.size();
    out.evidence["non_members"] = non_members;
    if (!non_members.empty()) {
        out.status = Status::Fails;
    } else if (!open.empty()) {
        out.status = Status::Inconclusive;
        out.evidence["blocking"] = open;
    }
    return out;
}

}  // namespace cqkit
