#include "cqkit/polynomial.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <cmath>
#include <numeric>

#include "cqkit/errors.hpp"

namespace cqkit {

double to_double(const Rational& q) {
    if (q == 0) {
        return 0.0;
    }
    // mpq_get_d truncates; pick the nearer of the truncation and its outward neighbour.
    const double t = q.get_d();
    if (!std::isfinite(t)) {
        return t;
    }
    const double away = std::nextafter(t, q > 0 ? INFINITY : -INFINITY);
    if (!std::isfinite(away)) {
        return t;
    }
    const Rational dt = abs(q - from_double(t));
    const Rational da = abs(q - from_double(away));
    if (dt < da) {
        return t;
    }
    if (da < dt) {
        return away;
    }
    std::int64_t bits_t = 0;
    static_assert(sizeof(bits_t) == sizeof(t));
    std::memcpy(&bits_t, &t, sizeof t);
    return (bits_t & 1) == 0 ? t : away;
}

Rational from_double(double x) {
    if (!std::isfinite(x)) {
        throw Error("cannot convert non-finite value to a rational");
    }
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool negative = false;
    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
        negative = s[pos] == '-';
        ++pos;
    }
    s = s.substr(pos);
    if (s.empty()) {
        throw Error("empty rational literal");
    }
    Rational value;
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        auto digits = [](const std::string& d) {
            return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
        };
        if (!digits(num) || !digits(den)) {
            throw Error("malformed rational literal '" + text + "'");
        }
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) {
            throw Error("zero denominator in '" + text + "'");
        }
        value = Rational(n, d);
    } else {
        long exponent = 0;
        if (auto e = s.find_first_of("eE"); e != std::string::npos) {
            const std::string tail = s.substr(e + 1);
            std::size_t used = 0;
            try {
                exponent = std::stol(tail, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (tail.empty() || used != tail.size() || exponent > 4000 || exponent < -4000) {
                throw Error("malformed decimal literal '" + text + "'");
            }
            s = s.substr(0, e);
        }
        const auto dot = s.find('.');
        std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
        std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
        if (whole.empty()) {
            whole = "0";
        }
        auto digits = [](const std::string& d) {
            return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
        };
        if (!digits(whole) || !digits(frac) || (dot != std::string::npos && frac.empty() && whole == "0" && s[0] == '.')) {
            throw Error("malformed decimal literal '" + text + "'");
        }
        mpz_class scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) {
            scale *= 10;
        }
        value = Rational(mpz_class(whole + frac, 10), scale);
        if (exponent != 0) {
            mpz_class ten;
            mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
            value = exponent > 0 ? Rational(value * ten) : Rational(value / ten);
        }
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

std::string format_rational(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    if (c.get_den() == 1) {
        return c.get_num().get_str();
    }
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Polynomial::Polynomial(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) {
        throw DimensionError("polynomial dimension must be positive");
    }
}

Polynomial Polynomial::constant(std::size_t dimension, const Rational& c) {
    Polynomial p(dimension);
    p.add_term(Exponent(dimension, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t dimension, std::size_t index) {
    if (index >= dimension) {
        throw DimensionError("variable index out of range");
    }
    Exponent e(dimension, 0);
    e[index] = 1;
    return monomial(e, 1);
}

Polynomial Polynomial::monomial(const Exponent& exps, const Rational& c) {
    Polynomial p(exps.size());
    p.add_term(exps, c);
    return p;
}

std::uint32_t Polynomial::degree() const {
    std::uint32_t best = 0;
    for (const auto& [e, c] : terms_) {
        best = std::max(best, std::accumulate(e.begin(), e.end(), std::uint32_t{0}));
    }
    return best;
}

void Polynomial::add_term(const Exponent& exps, const Rational& c) {
    if (exps.size() != dim_) {
        throw DimensionError("exponent length does not match polynomial dimension");
    }
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(exps, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    if (other.dim_ != dim_) {
        throw DimensionError("polynomial dimensions differ");
    }
    for (const auto& [e, c] : other.terms_) {
        add_term(e, c);
    }
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    if (other.dim_ != dim_) {
        throw DimensionError("polynomial dimensions differ");
    }
    for (const auto& [e, c] : other.terms_) {
        add_term(e, -c);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) {
        v *= c;
    }
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.dim_ != b.dim_) {
        throw DimensionError("polynomial dimensions differ");
    }
    Polynomial out(a.dim_);
    Exponent e(a.dim_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < a.dim_; ++i) {
                e[i] = ea[i] + eb[i];
            }
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::operator-() const {
    Polynomial out = *this;
    out *= Rational(-1);
    return out;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial out = constant(dim_, 1);
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1U) {
            out = out * base;
        }
        k >>= 1U;
        if (k > 0) {
            base = base * base;
        }
    }
    return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
    return dim_ == other.dim_ && terms_ == other.terms_;
}

Polynomial Polynomial::derivative(std::size_t index) const {
    if (index >= dim_) {
        throw DimensionError("derivative index out of range");
    }
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[index] == 0) {
            continue;
        }
        Exponent d = e;
        d[index] -= 1;
        out.add_term(d, c * e[index]);
    }
    return out;
}

std::vector<Polynomial> Polynomial::gradient() const {
    std::vector<Polynomial> g;
    g.reserve(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        g.push_back(derivative(i));
    }
    return g;
}

Rational Polynomial::evaluate_exact(std::span<const Rational> point) const {
    if (point.size() != dim_) {
        throw DimensionError("evaluation point has length " + std::to_string(point.size()) + ", expected " +
                             std::to_string(dim_));
    }
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational term = c;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::uint32_t k = 0; k < e[i]; ++k) {
                term *= point[i];
            }
        }
        sum += term;
    }
    return sum;
}

double Polynomial::evaluate(std::span<const double> point) const {
    if (point.size() != dim_) {
        throw DimensionError("evaluation point has length " + std::to_string(point.size()) + ", expected " +
                             std::to_string(dim_));
    }
    std::vector<Rational> exact;
    exact.reserve(dim_);
    for (double x : point) {
        exact.push_back(from_double(x));
    }
    return to_double(evaluate_exact(exact));
}

namespace {

// Descending total degree, then descending lexicographic exponent.
bool graded_before(const Exponent& a, const Exponent& b) {
    const auto da = std::accumulate(a.begin(), a.end(), std::uint32_t{0});
    const auto db = std::accumulate(b.begin(), b.end(), std::uint32_t{0});
    if (da != db) {
        return da > db;
    }
    return a > b;
}

}  // namespace

std::string Polynomial::to_string() const {
    if (terms_.empty()) {
        return "0";
    }
    std::vector<const TermMap::value_type*> order;
    for (const auto& t : terms_) {
        order.push_back(&t);
    }
    std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return graded_before(x->first, y->first); });

    std::string out;
    bool first = true;
    for (const auto* t : order) {
        const auto& [e, c] = *t;
        const bool negative = c < 0;
        const Rational mag = abs(c);
        if (first) {
            out += negative ? "-" : "";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;

        std::string vars;
        for (std::size_t i = 0; i < dim_; ++i) {
            if (e[i] == 0) {
                continue;
            }
            if (!vars.empty()) {
                vars += "*";
            }
            vars += "theta" + std::to_string(i + 1);
            if (e[i] > 1) {
                vars += "^" + std::to_string(e[i]);
            }
        }
        if (vars.empty()) {
            out += format_rational(mag);
        } else if (mag == 1) {
            out += vars;
        } else {
            out += format_rational(mag) + "*" + vars;
        }
    }
    return out;
}

}  // namespace cqkit
