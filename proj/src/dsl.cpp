#include "cqkit/dsl.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>

#include "cqkit/errors.hpp"

namespace cqkit {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    int column;  // 1-based
    int index;   // 1-based within the statement
};

struct Statement {
    int line;
    std::vector<Token> tokens;
};

std::vector<Statement> tokenize(const std::string& text) {
    std::vector<Statement> out;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        Statement cur{line_no, {}};
        auto flush = [&](int end_column) {
            if (!cur.tokens.empty()) {
                cur.tokens.push_back({Tok::End, "", end_column, static_cast<int>(cur.tokens.size()) + 1});
                out.push_back(std::move(cur));
            }
            cur = Statement{line_no, {}};
        };
        std::size_t i = 0;
        while (i < raw.size()) {
            const char c = raw[i];
            const int col = static_cast<int>(i) + 1;
            const int idx = static_cast<int>(cur.tokens.size()) + 1;
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == ';') {
                flush(col);
                ++i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[j])) || raw[j] == '_')) {
                    ++j;
                }
                cur.tokens.push_back({Tok::Ident, raw.substr(i, j - i), col, idx});
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t j = i;
                while (j < raw.size() && (std::isdigit(static_cast<unsigned char>(raw[j])) || raw[j] == '.')) {
                    ++j;
                }
                if (j < raw.size() && (raw[j] == 'e' || raw[j] == 'E')) {
                    std::size_t k = j + 1;
                    if (k < raw.size() && (raw[k] == '+' || raw[k] == '-')) {
                        ++k;
                    }
                    if (k < raw.size() && std::isdigit(static_cast<unsigned char>(raw[k]))) {
                        while (k < raw.size() && std::isdigit(static_cast<unsigned char>(raw[k]))) {
                            ++k;
                        }
                        j = k;
                    }
                }
                cur.tokens.push_back({Tok::Number, raw.substr(i, j - i), col, idx});
                i = j;
            } else if (std::string_view("()[],:+-*/^").find(c) != std::string_view::npos) {
                cur.tokens.push_back({Tok::Punct, std::string(1, c), col, idx});
                ++i;
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", line_no, col, idx);
            }
        }
        flush(static_cast<int>(raw.size()) + 1);
    }
    return out;
}

class StatementParser {
public:
    StatementParser(const Statement& st, std::size_t dim) : st_(st), dim_(dim) {}

    const Token& peek() const { return st_.tokens[pos_]; }
    const Token& next() { return st_.tokens[pos_ < st_.tokens.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& what, const Token& at) const {
        throw ParseError(what + (at.kind == Tok::End ? " (found end of statement)" : " (found '" + at.text + "')"),
                         st_.line, at.column, at.index);
    }

    bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }

    void expect_punct(const char* p) {
        if (!is_punct(p)) {
            fail(std::string("expected '") + p + "'", peek());
        }
        next();
    }

    void expect_ident(const char* word) {
        if (peek().kind != Tok::Ident || peek().text != word) {
            fail(std::string("expected '") + word + "'", peek());
        }
        next();
    }

    void expect_end() {
        if (peek().kind != Tok::End) {
            fail("unexpected trailing input", peek());
        }
    }

    std::uint64_t integer() {
        const Token& t = peek();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail("expected integer", t);
        }
        next();
        try {
            return std::stoull(t.text);
        } catch (const std::exception&) {
            fail("integer out of range", t);
        }
    }

    /// NUMBER ['/' NUMBER], unsigned.
    Rational unsigned_rational() {
        const Token& t = peek();
        if (t.kind != Tok::Number) {
            fail("expected number", t);
        }
        next();
        std::string text = t.text;
        if (is_punct("/")) {
            next();
            const Token& den = peek();
            if (den.kind != Tok::Number) {
                fail("expected denominator", den);
            }
            next();
            text += "/" + den.text;
        }
        try {
            return parse_rational(text);
        } catch (const Error& e) {
            fail(e.what(), t);
        }
    }

    Rational signed_rational() {
        bool negative = false;
        if (is_punct("-") || is_punct("+")) {
            negative = next().text == "-";
        }
        Rational q = unsigned_rational();
        return negative ? Rational(-q) : q;
    }

    /// "thetaN" with optional "^K"; multiplies into exps.
    void var_power(Exponent& exps) {
        const Token& t = peek();
        if (t.kind != Tok::Ident || t.text.size() <= 5 || t.text.compare(0, 5, "theta") != 0 ||
            t.text.find_first_not_of("0123456789", 5) != std::string::npos) {
            fail("expected variable thetaN", t);
        }
        next();
        std::size_t index = 0;
        try {
            index = std::stoull(t.text.substr(5));
        } catch (const std::exception&) {
            fail("variable index out of range", t);
        }
        if (index == 0 || index > dim_) {
            throw DimensionError("syntax error at line " + std::to_string(st_.line) + ", column " +
                                 std::to_string(t.column) + " (token " + std::to_string(t.index) +
                                 "): variable " + t.text + " outside declared dimension " + std::to_string(dim_));
        }
        std::uint64_t power = 1;
        if (is_punct("^")) {
            next();
            power = integer();
            if (power > 1000) {
                fail("exponent too large", peek());
            }
        }
        exps[index - 1] += static_cast<std::uint32_t>(power);
    }

    Polynomial monomial() {
        Exponent exps(dim_, 0);
        Rational coef = 1;
        if (peek().kind == Tok::Number) {
            coef = unsigned_rational();
            if (!is_punct("*")) {
                return Polynomial::monomial(exps, coef);
            }
            next();
        }
        var_power(exps);
        while (is_punct("*")) {
            next();
            var_power(exps);
        }
        return Polynomial::monomial(exps, coef);
    }

    Polynomial polynomial() {
        Polynomial out(dim_);
        bool negative = false;
        if (is_punct("-") || is_punct("+")) {
            negative = next().text == "-";
        }
        Polynomial m = monomial();
        out += negative ? -m : m;
        while (is_punct("+") || is_punct("-")) {
            negative = next().text == "-";
            m = monomial();
            out += negative ? -m : m;
        }
        expect_end();
        return out;
    }

private:
    const Statement& st_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

std::string box_text(const MomentModel& model) {
    for (std::size_t i = 1; i < model.dim(); ++i) {
        if (model.lower_exact()[i] != model.lower_exact()[0] || model.upper_exact()[i] != model.upper_exact()[0]) {
            throw ValidationError("the model language only expresses a common box for all parameters");
        }
    }
    return "box(" + format_rational(model.lower_exact()[0]) + "," + format_rational(model.upper_exact()[0]) + ")";
}

}  // namespace

MomentModel parse_model(const ModelSource& source) {
    return parse_model(source.text);
}

MomentModel parse_model(const std::string& text) {
    const std::vector<Statement> statements = tokenize(text);
    if (statements.empty()) {
        throw ParseError("empty model text", 1, 1, 1);
    }

    // header
    const Statement& head = statements.front();
    StatementParser hp(head, 1);
    hp.expect_ident("params");
    hp.expect_ident("theta");
    hp.expect_punct("[");
    const Token& dim_tok = hp.peek();
    const std::uint64_t dim = hp.integer();
    if (dim == 0 || dim > 64) {
        hp.fail("dimension must be between 1 and 64", dim_tok);
    }
    hp.expect_punct("]");
    hp.expect_ident("in");
    hp.expect_ident("box");
    hp.expect_punct("(");
    const Rational lo = hp.signed_rational();
    hp.expect_punct(",");
    const Rational hi = hp.signed_rational();
    hp.expect_punct(")");
    hp.expect_end();
    if (!(lo < hi)) {
        throw ValidationError("box lower bound must be below upper bound");
    }

    std::vector<Polynomial> ineq;
    std::vector<Polynomial> eq;
    std::optional<std::vector<Rational>> direction;
    for (std::size_t s = 1; s < statements.size(); ++s) {
        StatementParser sp(statements[s], dim);
        const Token& kw = sp.peek();
        if (kw.kind != Tok::Ident || (kw.text != "ineq" && kw.text != "eq" && kw.text != "direction")) {
            sp.fail("expected 'ineq:', 'eq:' or 'direction:'", kw);
        }
        sp.next();
        sp.expect_punct(":");
        if (kw.text == "direction") {
            if (direction) {
                sp.fail("duplicate direction", kw);
            }
            sp.expect_punct("(");
            std::vector<Rational> p{sp.signed_rational()};
            while (sp.is_punct(",")) {
                sp.next();
                p.push_back(sp.signed_rational());
            }
            sp.expect_punct(")");
            sp.expect_end();
            if (p.size() != dim) {
                throw DimensionError("direction has " + std::to_string(p.size()) + " entries, model dimension is " +
                                     std::to_string(dim));
            }
            direction = std::move(p);
        } else if (kw.text == "ineq") {
            ineq.push_back(sp.polynomial());
        } else {
            eq.push_back(sp.polynomial());
        }
    }
    if (ineq.empty() && eq.empty()) {
        throw ValidationError("model has no constraints");
    }
    return MomentModel(dim, std::vector<Rational>(dim, lo), std::vector<Rational>(dim, hi), std::move(ineq),
                       std::move(eq), std::move(direction));
}

std::string serialize_model(const MomentModel& model) {
    std::string out = "params theta[" + std::to_string(model.dim()) + "] in " + box_text(model) + "\n";
    for (const Polynomial& p : model.inequalities()) {
        out += "ineq: " + p.to_string() + "\n";
    }
    for (const Polynomial& p : model.equalities()) {
        out += "eq: " + p.to_string() + "\n";
    }
    if (const auto& dir = model.direction_exact()) {
        out += "direction: (";
        for (std::size_t i = 0; i < dir->size(); ++i) {
            out += (i ? "," : "") + format_rational((*dir)[i]);
        }
        out += ")\n";
    }
    return out;
}

std::string model_fingerprint(const MomentModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_model(model)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cqkit
