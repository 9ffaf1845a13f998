#include "cqkit/examples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cqkit/errors.hpp"
#include "cqkit/simplex.hpp"

namespace cqkit {

namespace {

using QVec = std::vector<Rational>;

// Solves the square system exactly; nullopt when singular.
std::optional<QVec> solve_exact(std::vector<QVec> a, QVec rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && sgn(a[piv][c]) == 0) {
            ++piv;
        }
        if (piv == n) {
            return std::nullopt;
        }
        std::swap(a[piv], a[c]);
        std::swap(rhs[piv], rhs[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || sgn(a[r][c]) == 0) {
                continue;
            }
            const Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    QVec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rhs[i] / a[i][i];
    }
    return x;
}

std::size_t exact_rank(std::vector<QVec> a) {
    if (a.empty()) {
        return 0;
    }
    const std::size_t cols = a[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t piv = rank;
        while (piv < a.size() && sgn(a[piv][c]) == 0) {
            ++piv;
        }
        if (piv == a.size()) {
            continue;
        }
        std::swap(a[piv], a[rank]);
        for (std::size_t r = rank + 1; r < a.size(); ++r) {
            const Rational f = a[r][c] / a[rank][c];
            for (std::size_t k = c; k < cols; ++k) {
                a[r][k] -= f * a[rank][k];
            }
        }
        ++rank;
    }
    return rank;
}

// Calls f on every m-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t m, F f) {
    if (m > n) {
        return;
    }
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) {
        idx[i] = i;
    }
    while (true) {
        f(idx);
        std::size_t i = m;
        while (i > 0 && idx[i - 1] == n - m + i - 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < m; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

Rational dot(const QVec& a, const QVec& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

Vec to_vec(const QVec& q) {
    Vec v(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = to_double(q[i]);
    }
    return v;
}

QVec to_qvec(const Vec& v) {
    QVec q;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        q.push_back(from_double(v[i]));
    }
    return q;
}

}  // namespace

double interval_sigma(double pi, double mean, double var) {
    return std::sqrt(pi * (var + mean * mean) - pi * pi * mean * mean) / pi;
}

std::vector<std::vector<Rational>> enumerate_vertices(const std::vector<std::vector<Rational>>& rows,
                                                      const std::vector<Rational>& rhs) {
    std::vector<QVec> out;
    if (rows.empty()) {
        return out;
    }
    const std::size_t d = rows[0].size();
    for_each_subset(rows.size(), d, [&](const std::vector<std::size_t>& idx) {
        std::vector<QVec> a;
        QVec r;
        for (std::size_t i : idx) {
            a.push_back(rows[i]);
            r.push_back(rhs[i]);
        }
        const auto x = solve_exact(a, r);
        if (!x) {
            return;
        }
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (dot(rows[j], *x) > rhs[j]) {
                return;
            }
        }
        if (std::find(out.begin(), out.end(), *x) == out.end()) {
            out.push_back(*x);
        }
    });
    return out;
}

IntervalModel build_interval_regression(const IntervalRegressionSpec& spec) {
    const auto& cells = spec.cells;
    if (cells.empty()) {
        throw ValidationError("interval regression needs at least one support point");
    }
    const auto d = static_cast<std::size_t>(cells[0].z.size());
    double total = 0.0;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto& c = cells[r];
        if (static_cast<std::size_t>(c.z.size()) != d) {
            throw ValidationError("support point " + std::to_string(r + 1) + " has the wrong dimension");
        }
        if (c.z[0] != 1.0) {
            throw ValidationError("support point " + std::to_string(r + 1) + " must have first coordinate 1");
        }
        if (!(c.pi > 0.0)) {
            throw ValidationError("cell probabilities must be positive");
        }
        if (!(c.var_w0 > 0.0) || !(c.var_w1 > 0.0)) {
            throw ValidationError("cell " + std::to_string(r + 1) + " has zero variance");
        }
        total += c.pi;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw ValidationError("cell probabilities must sum to 1");
    }

    IntervalConditions cond;
    cond.nondegenerate = true;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        if (!(cells[r].mean_w1 - cells[r].mean_w0 > 0.0)) {
            throw ValidationError("degenerate interval at support point " + std::to_string(r + 1) +
                                  ": E[W1 - W0 | z] must be positive");
        }
    }

    const std::size_t k = cells.size();
    std::vector<QVec> zs;
    for (const auto& c : cells) {
        zs.push_back(to_qvec(c.z));
    }
    cond.k_at_least_d = k >= d;
    cond.subsets_independent = true;
    for (std::size_t m = 1; m <= std::min(k, d) && cond.subsets_independent; ++m) {
        for_each_subset(k, m, [&](const std::vector<std::size_t>& idx) {
            std::vector<QVec> a;
            for (std::size_t i : idx) {
                a.push_back(zs[i]);
            }
            if (exact_rank(a) < m) {
                cond.subsets_independent = false;
            }
        });
    }
    if (!cond.k_at_least_d) {
        cond.messages.push_back("fewer support points than parameters");
    }
    if (!cond.subsets_independent) {
        cond.messages.push_back("some set of at most d support points is linearly dependent");
    }

    std::vector<QVec> rows;
    QVec rhs;
    for (int side = 0; side < 2; ++side) {
        for (const auto& c : cells) {
            const double mean = side == 0 ? c.mean_w0 : c.mean_w1;
            const double var = side == 0 ? c.var_w0 : c.var_w1;
            const Rational s = from_double(1.0 / interval_sigma(c.pi, mean, var));
            QVec row;
            for (Eigen::Index i = 0; i < c.z.size(); ++i) {
                row.push_back((side == 0 ? -1 : 1) * from_double(c.z[i]) * s);
            }
            rows.push_back(row);
            rhs.push_back((side == 0 ? -1 : 1) * from_double(mean) * s);
        }
    }

    double reach = 1.0;
    std::vector<Vec> vertices;
    for (const QVec& v : enumerate_vertices(rows, rhs)) {
        vertices.push_back(to_vec(v));
        reach = std::max(reach, vertices.back().cwiseAbs().maxCoeff());
    }
    const Rational half = Rational(static_cast<long>(std::ceil(2.0 * reach)) + 1);

    std::vector<Polynomial> ineq;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        Polynomial poly = Polynomial::constant(d, -rhs[j]);
        for (std::size_t i = 0; i < d; ++i) {
            poly += Polynomial::variable(d, i) * rows[j][i];
        }
        ineq.push_back(std::move(poly));
    }
    IntervalModel im{MomentModel(d, QVec(d, -half), QVec(d, half), std::move(ineq), {}),
                     std::move(rows),
                     std::move(rhs),
                     {},
                     {},
                     std::move(vertices),
                     cond};
    im.D.resize(static_cast<Eigen::Index>(im.rows.size()), static_cast<Eigen::Index>(d));
    im.b.resize(static_cast<Eigen::Index>(im.rows.size()));
    for (std::size_t j = 0; j < im.rows.size(); ++j) {
        im.D.row(static_cast<Eigen::Index>(j)) = to_vec(im.rows[j]).transpose();
        im.b[static_cast<Eigen::Index>(j)] = to_double(im.rhs[j]);
    }

    Mat gram = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    double sup_w = 0.0;
    for (const auto& c : cells) {
        gram += c.z * c.z.transpose();
        sup_w = std::max({sup_w, std::fabs(c.mean_w0), std::fabs(c.mean_w1)});
    }
    im.conditions.c0 = Eigen::SelfAdjointEigenSolver<Mat>(gram).eigenvalues().minCoeff();
    im.conditions.b0 = to_double(half * half);
    if (spec.w_range) {
        im.conditions.w_compact = std::isfinite(spec.w_range->first) && std::isfinite(spec.w_range->second);
        sup_w = std::max(std::fabs(spec.w_range->first), std::fabs(spec.w_range->second));
    } else {
        im.conditions.w_compact = true;
        im.conditions.messages.push_back("outcome range not declared; using the conditional means");
    }
    im.conditions.sup_w2 = sup_w * sup_w;
    im.conditions.radius_ok = im.conditions.c0 * im.conditions.b0 > static_cast<double>(k) * im.conditions.sup_w2;
    if (!im.conditions.radius_ok) {
        im.conditions.messages.push_back("advisory: C0 B0 <= k sup w^2");
    }
    return im;
}

IntervalRegressionSpec ingest_interval_data(const std::vector<IntervalRow>& rows) {
    if (rows.empty()) {
        throw ValidationError("no data rows");
    }
    struct Acc {
        std::vector<double> w0, w1;
        Vec z;
    };
    std::map<std::vector<double>, Acc> groups;
    double lo = rows[0].w0, hi = rows[0].w1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.w0 > r.w1) {
            throw ValidationError("row " + std::to_string(i + 1) + ": w0 > w1");
        }
        if (r.z.size() == 0 || r.z[0] != 1.0) {
            throw ValidationError("row " + std::to_string(i + 1) + ": z1 must be 1");
        }
        auto& g = groups[std::vector<double>(r.z.data(), r.z.data() + r.z.size())];
        g.z = r.z;
        g.w0.push_back(r.w0);
        g.w1.push_back(r.w1);
        lo = std::min(lo, r.w0);
        hi = std::max(hi, r.w1);
    }
    auto moments = [](const std::vector<double>& w) {
        double m = 0.0;
        for (double x : w) {
            m += x;
        }
        m /= static_cast<double>(w.size());
        double v = 0.0;
        for (double x : w) {
            v += (x - m) * (x - m);
        }
        return std::pair{m, v / static_cast<double>(w.size() - 1)};
    };
    IntervalRegressionSpec spec;
    spec.w_range = std::pair{lo, hi};
    for (const auto& [key, g] : groups) {
        if (g.w0.size() < 2) {
            throw ValidationError("cell with a single observation: variance undefined");
        }
        IntervalCell c;
        c.z = g.z;
        c.pi = static_cast<double>(g.w0.size()) / static_cast<double>(rows.size());
        std::tie(c.mean_w0, c.var_w0) = moments(g.w0);
        std::tie(c.mean_w1, c.var_w1) = moments(g.w1);
        if (c.var_w0 <= 0.0 || c.var_w1 <= 0.0) {
            throw ValidationError("cell with zero variance");
        }
        spec.cells.push_back(c);
    }
    return spec;
}

std::vector<IntervalRow> read_interval_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty CSV");
    }
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell.erase(0, cell.find_first_not_of(" \t\r"));
            cell.erase(cell.find_last_not_of(" \t\r") + 1);
            out.push_back(cell);
        }
        return out;
    };
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "w0" || header[1] != "w1") {
        throw ValidationError("CSV header must be w0,w1,z1,...,zd");
    }
    for (std::size_t i = 2; i < header.size(); ++i) {
        if (header[i] != "z" + std::to_string(i - 1)) {
            throw ValidationError("CSV header must be w0,w1,z1,...,zd");
        }
    }
    std::vector<IntervalRow> rows;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ++n;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ValidationError("row " + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                                  " fields");
        }
        std::vector<double> v;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(c, &used));
                if (used != c.size()) {
                    throw std::invalid_argument(c);
                }
            } catch (const std::exception&) {
                throw ValidationError("row " + std::to_string(n) + ": malformed number '" + c + "'");
            }
        }
        IntervalRow r;
        r.w0 = v[0];
        r.w1 = v[1];
        r.z = Eigen::Map<const Vec>(v.data() + 2, static_cast<Eigen::Index>(v.size() - 2));
        if (r.w0 > r.w1) {
            throw ValidationError("row " + std::to_string(n) + ": w0 > w1");
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) {
        throw ValidationError("no data rows");
    }
    return rows;
}

double interval_lp_value(const IntervalModel& im, const Vec& p) {
    LinearProgram<Rational> lp;
    lp.objective = to_qvec(p);
    lp.ineq_rows = im.rows;
    lp.ineq_rhs = im.rhs;
    lp.lower = im.model.lower_exact();
    for (const Rational& u : im.model.upper_exact()) {
        lp.upper.emplace_back(u);
    }
    const auto res = solve_lp(lp);
    if (res.status != LpStatus::Optimal) {
        throw ValidationError("interval regression polytope is empty");
    }
    return to_double(res.value);
}

const char* to_string(FaceKind k) {
    switch (k) {
    case FaceKind::Facet:
        return "facet";
    case FaceKind::LFace:
        return "l-face";
    case FaceKind::Vertex:
        return "vertex";
    }
    return "?";
}

FaceClassification classify_support_face(const IntervalModel& im, const Vec& p) {
    if (!im.conditions.validated()) {
        throw ValidationError("interval regression model is degenerate: need k >= d and independent d-subsets of z");
    }
    FaceClassification out;
    out.value = interval_lp_value(im, p);
    const auto k = im.rows.size() / 2;
    const Vec pn = p.normalized();
    for (std::size_t r = 0; r < k; ++r) {
        const Vec z = to_vec(im.rows[k + r]).normalized();
        if ((pn - z).norm() <= 1e-12 || (pn + z).norm() <= 1e-12) {
            out.kind = FaceKind::Facet;
            out.facet_cell = r;
            out.predicted[Node::MFCQ] = Status::Holds;
            return out;
        }
    }
    const QVec pq = to_qvec(p);
    std::vector<QVec> best;
    Rational best_value;
    for (const QVec& v : enumerate_vertices(im.rows, im.rhs)) {
        const Rational val = dot(pq, v);
        if (best.empty() || val > best_value) {
            best = {v};
            best_value = val;
        } else if (val == best_value) {
            best.push_back(v);
        }
    }
    for (const QVec& v : best) {
        out.optimal_vertices.push_back(to_vec(v));
    }
    if (best.size() > 1) {
        out.kind = FaceKind::LFace;
        out.predicted[Node::MFCQ] = Status::Holds;
        return out;
    }
    out.kind = FaceKind::Vertex;
    for (std::size_t j = 0; j < im.rows.size(); ++j) {
        if (!best.empty() && dot(im.rows[j], best[0]) == im.rhs[j]) {
            ++out.active_rows;
        }
    }
    if (out.active_rows <= im.model.dim()) {
        out.predicted[Node::MFCQ] = Status::Holds;
        out.predicted[Node::LICQ] = Status::Holds;
    }
    return out;
}

IntervalRegressionSpec hexagon_spec() {
    IntervalRegressionSpec spec;
    for (double z2 : {-1.0, 0.0, 1.0}) {
        IntervalCell c;
        c.z = Vec(2);
        c.z << 1.0, z2;
        c.pi = 1.0 / 3.0;
        c.mean_w0 = 0.0;
        c.mean_w1 = 1.0;
        c.var_w0 = 1.0;
        c.var_w1 = 1.0;
        spec.cells.push_back(c);
    }
    spec.w_range = std::pair{-3.0, 4.0};
    return spec;
}

MomentModel build_entry_game(const EntryGameSpec& spec) {
    for (const Rational* q : {&spec.pi11, &spec.pi10, &spec.pi01}) {
        if (sgn(*q) <= 0 || *q >= 1) {
            throw ValidationError("entry game probabilities must lie in (0,1)");
        }
    }
    if (spec.pi11 + spec.pi10 + spec.pi01 != 1) {
        throw ValidationError("entry game probabilities must sum to 1");
    }
    const Polynomial one = Polynomial::constant(2, 1);
    const Polynomial t1 = Polynomial::variable(2, 0), t2 = Polynomial::variable(2, 1);
    std::vector<Polynomial> ineq = {(one - t1) * t2 - Polynomial::constant(2, spec.pi10),
                                    t1 * (one - t2) - Polynomial::constant(2, spec.pi01)};
    if (spec.explicit_bounds) {
        ineq.push_back(-t1);
        ineq.push_back(-t2);
        ineq.push_back(t1 - one);
        ineq.push_back(t2 - one);
    }
    std::vector<Polynomial> eq = {(one - t1) * (one - t2) - Polynomial::constant(2, spec.pi11)};
    // The equality has a second branch with both coordinates above 1, at
    // (theta1 - 1)(theta2 - 1) = pi11; keep the margin below sqrt(pi11).
    Rational margin(1, 4);
    while (margin * margin >= spec.pi11) {
        margin /= 2;
    }
    const Rational lo = -margin, hi = 1 + margin;
    return MomentModel(2, {lo, lo}, {hi, hi}, std::move(ineq), std::move(eq), QVec{0, 1});
}

std::optional<Vec> entry_game_support_point(const EntryGameSpec& spec, const Vec& p) {
    const Vec pn = p.normalized();
    const double p11 = to_double(spec.pi11), p10 = to_double(spec.pi10), p01 = to_double(spec.pi01);
    Vec out(2);
    if (std::fabs(pn[0]) < 1e-15 && pn[1] > 0) {
        out << p01, p10 / (p10 + p11);
        return out;
    }
    if (std::fabs(pn[1]) < 1e-15 && pn[0] > 0) {
        out << p01 / (p01 + p11), p10;
        return out;
    }
    return std::nullopt;
}

Vec entry_game_tangent_ray(const EntryGameSpec& spec) {
    const double p11 = to_double(spec.pi11), p10 = to_double(spec.pi10);
    Vec t(2);
    t << p10 + p11, -p11 / (p10 + p11);
    return t.normalized();
}

}  // namespace cqkit
