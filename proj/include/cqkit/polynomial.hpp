#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cqkit {

using Rational = mpq_class;

/// Exponent multi-index; length equals the polynomial dimension.
using Exponent = std::vector<std::uint32_t>;

/// Rounds an exact rational to the nearest double (ties to even).
double to_double(const Rational& q);

/// Exact rational value of a finite double.
Rational from_double(double x);

/// Parses "p/q", an integer, or a plain decimal literal ("-0.125").
Rational parse_rational(const std::string& text);

/// Canonical text for a rational: "p" or "p/q" in lowest terms.
std::string format_rational(const Rational& q);

/// Sparse multivariate polynomial in theta_1..theta_d with rational
/// coefficients. Zero coefficients are never stored.
class Polynomial {
public:
    using TermMap = std::map<Exponent, Rational>;

    explicit Polynomial(std::size_t dimension);

    static Polynomial constant(std::size_t dimension, const Rational& c);
    /// theta_{index+1}; index is zero-based.
    static Polynomial variable(std::size_t dimension, std::size_t index);
    static Polynomial monomial(const Exponent& exps, const Rational& c);

    std::size_t dimension() const noexcept { return dim_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::uint32_t degree() const;

    /// Adds c * x^exps, dropping the term if the result is zero.
    void add_term(const Exponent& exps, const Rational& c);

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(const Rational& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    Polynomial operator-() const;
    Polynomial pow(unsigned k) const;

    bool operator==(const Polynomial& other) const;

    Polynomial derivative(std::size_t index) const;
    std::vector<Polynomial> gradient() const;

    Rational evaluate_exact(std::span<const Rational> point) const;
    /// Exact evaluation at the double inputs, rounded once.
    double evaluate(std::span<const double> point) const;

    /// DSL text ("theta2^3 - theta1"); terms in descending graded order.
    std::string to_string() const;

private:
    std::size_t dim_;
    TermMap terms_;
};

}  // namespace cqkit
