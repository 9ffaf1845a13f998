#pragma once

#include <stdexcept>
#include <string>

namespace cqkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Model DSL syntax or semantic error. Line, column and token index are
/// 1-based; token counts restart at every statement (newline or ';').
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column, int token)
        : Error(format(what, line, column, token)), line_(line), column_(column), token_(token) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    int token() const noexcept { return token_; }

private:
    static std::string format(const std::string& what, int line, int column, int token) {
        return "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
               " (token " + std::to_string(token) + "): " + what;
    }
    int line_;
    int column_;
    int token_;
};

/// No feasible parameter value could be located.
class EmptyIdentifiedSet : public Error {
public:
    using Error::Error;
};

class InfeasiblePoint : public Error {
public:
    using Error::Error;
};

class OutOfBox : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace cqkit
