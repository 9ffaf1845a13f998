#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cqkit/polynomial.hpp"

namespace cqkit {

/// Comparison policy: exact for rationals, absolute epsilon for doubles.
template <class T>
struct LpTraits;

template <>
struct LpTraits<double> {
    static constexpr double eps = 1e-12;
    static bool positive(double x) { return x > eps; }
    static bool negative(double x) { return x < -eps; }
};

template <>
struct LpTraits<Rational> {
    static bool positive(const Rational& x) { return sgn(x) > 0; }
    static bool negative(const Rational& x) { return sgn(x) < 0; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// maximize c'x  s.t.  A x <= b,  E x = f,  lower <= x <= upper (upper may be absent).
template <class T>
struct LinearProgram {
    std::vector<T> objective;
    std::vector<std::vector<T>> ineq_rows;
    std::vector<T> ineq_rhs;
    std::vector<std::vector<T>> eq_rows;
    std::vector<T> eq_rhs;
    std::vector<T> lower;
    std::vector<std::optional<T>> upper;
};

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> x;
    T value{};
    int pivots = 0;
};

namespace detail {

/// Dense two-phase tableau simplex on y >= 0, Bland's rule throughout.
template <class T>
class Tableau {
public:
    using Tr = LpTraits<T>;

    // rows: coefficients over n structural columns, relation (-1: <=, 0: =), rhs
    Tableau(std::size_t n, const std::vector<std::vector<T>>& rows, const std::vector<int>& rel,
            const std::vector<T>& rhs)
        : n_(n) {
        const std::size_t m = rows.size();
        std::size_t slacks = 0;
        for (int r : rel) {
            slacks += r < 0 ? 1 : 0;
        }
        slack0_ = n_;
        art0_ = n_ + slacks;
        // every row gets an artificial; rows whose slack can serve as basis drop it
        std::vector<bool> needs_art(m, false);
        std::size_t arts = 0;
        for (std::size_t i = 0; i < m; ++i) {
            needs_art[i] = rel[i] == 0 || Tr::negative(rhs[i]);
            arts += needs_art[i] ? 1 : 0;
        }
        cols_ = art0_ + arts;
        a_.assign(m, std::vector<T>(cols_ + 1, T(0)));
        basis_.assign(m, 0);
        std::size_t s = slack0_, a = art0_;
        for (std::size_t i = 0; i < m; ++i) {
            const bool flip = Tr::negative(rhs[i]);
            for (std::size_t j = 0; j < n_; ++j) {
                a_[i][j] = flip ? T(-rows[i][j]) : rows[i][j];
            }
            a_[i][cols_] = flip ? T(-rhs[i]) : rhs[i];
            if (rel[i] < 0) {
                a_[i][s] = flip ? T(-1) : T(1);
                if (!needs_art[i]) {
                    basis_[i] = s;
                }
                ++s;
            }
            if (needs_art[i]) {
                a_[i][a] = T(1);
                basis_[i] = a++;
            }
        }
    }

    /// Returns false when the constraints are infeasible.
    bool phase_one() {
        std::vector<T> c(cols_, T(0));
        for (std::size_t j = art0_; j < cols_; ++j) {
            c[j] = T(-1);
        }
        price(c);
        run(cols_);
        if (Tr::negative(z_[cols_])) {
            return false;
        }
        // drive zero-level artificials out of the basis
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (basis_[i] < art0_) {
                continue;
            }
            for (std::size_t j = 0; j < art0_; ++j) {
                if (Tr::positive(a_[i][j]) || Tr::negative(a_[i][j])) {
                    pivot(i, j);
                    break;
                }
            }
        }
        return true;
    }

    /// Maximizes c over structural columns; false when unbounded.
    bool phase_two(const std::vector<T>& c_struct) {
        std::vector<T> c(cols_, T(0));
        for (std::size_t j = 0; j < n_; ++j) {
            c[j] = c_struct[j];
        }
        price(c);
        return run(art0_);
    }

    std::vector<T> solution() const {
        std::vector<T> y(n_, T(0));
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (basis_[i] < n_) {
                y[basis_[i]] = a_[i][cols_];
            }
        }
        return y;
    }

    T objective_value() const { return z_[cols_]; }
    int pivots() const { return pivots_; }

private:
    void price(const std::vector<T>& c) {
        z_.assign(cols_ + 1, T(0));
        for (std::size_t j = 0; j < cols_; ++j) {
            z_[j] = -c[j];
        }
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const T cb = c[basis_[i]];
            if (cb == T(0)) {
                continue;
            }
            for (std::size_t j = 0; j <= cols_; ++j) {
                z_[j] += cb * a_[i][j];
            }
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const T inv = T(1) / a_[r][c];
        for (auto& v : a_[r]) {
            v *= inv;
        }
        a_[r][c] = T(1);
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (i == r || a_[i][c] == T(0)) {
                continue;
            }
            const T f = a_[i][c];
            for (std::size_t j = 0; j <= cols_; ++j) {
                a_[i][j] -= f * a_[r][j];
            }
            a_[i][c] = T(0);
        }
        if (z_[c] != T(0)) {
            const T f = z_[c];
            for (std::size_t j = 0; j <= cols_; ++j) {
                z_[j] -= f * a_[r][j];
            }
            z_[c] = T(0);
        }
        basis_[r] = c;
        ++pivots_;
    }

    bool run(std::size_t allowed) {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (Tr::negative(z_[j])) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed) {
                return true;
            }
            std::size_t leave = a_.size();
            T best{};
            for (std::size_t i = 0; i < a_.size(); ++i) {
                if (!Tr::positive(a_[i][enter])) {
                    continue;
                }
                const T ratio = a_[i][cols_] / a_[i][enter];
                if (leave == a_.size() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == a_.size()) {
                return false;
            }
            pivot(leave, enter);
        }
    }

    std::size_t n_;
    std::size_t slack0_ = 0, art0_ = 0, cols_ = 0;
    std::vector<std::vector<T>> a_;
    std::vector<T> z_;
    std::vector<std::size_t> basis_;
    int pivots_ = 0;
};

}  // namespace detail

template <class T>
LpResult<T> solve_lp(const LinearProgram<T>& lp) {
    const std::size_t n = lp.objective.size();
    if (lp.lower.size() != n || lp.upper.size() != n) {
        throw std::invalid_argument("bound vectors must match the objective length");
    }
    // x = lower + y, y >= 0
    std::vector<std::vector<T>> rows;
    std::vector<int> rel;
    std::vector<T> rhs;
    auto shifted = [&](const std::vector<T>& row, const T& b) {
        T out = b;
        for (std::size_t j = 0; j < n; ++j) {
            out -= row[j] * lp.lower[j];
        }
        return out;
    };
    for (std::size_t i = 0; i < lp.ineq_rows.size(); ++i) {
        rows.push_back(lp.ineq_rows[i]);
        rel.push_back(-1);
        rhs.push_back(shifted(lp.ineq_rows[i], lp.ineq_rhs[i]));
    }
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
        rows.push_back(lp.eq_rows[i]);
        rel.push_back(0);
        rhs.push_back(shifted(lp.eq_rows[i], lp.eq_rhs[i]));
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (lp.upper[j]) {
            std::vector<T> row(n, T(0));
            row[j] = T(1);
            rows.push_back(std::move(row));
            rel.push_back(-1);
            rhs.push_back(T(*lp.upper[j] - lp.lower[j]));
        }
    }

    detail::Tableau<T> tab(n, rows, rel, rhs);
    LpResult<T> out;
    if (!tab.phase_one()) {
        out.status = LpStatus::Infeasible;
        out.pivots = tab.pivots();
        return out;
    }
    if (!tab.phase_two(lp.objective)) {
        out.status = LpStatus::Unbounded;
        out.pivots = tab.pivots();
        return out;
    }
    out.status = LpStatus::Optimal;
    out.x = tab.solution();
    out.value = T(0);
    for (std::size_t j = 0; j < n; ++j) {
        out.x[j] += lp.lower[j];
        out.value += lp.objective[j] * out.x[j];
    }
    out.pivots = tab.pivots();
    return out;
}

}  // namespace cqkit
