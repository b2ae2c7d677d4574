#pragma once

#include <stdexcept>
#include <string>

namespace ergospec {

// Base for every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range configuration (exit code 2).
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0, int column = 0)
        : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": " + msg : msg),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// Overflow, non-finite values, unreachable tolerances (exit code 3).
class NumericError : public Error {
public:
    using Error::Error;
};

// Requested sizes beyond the memory budget (exit code 4).
class ResourceError : public Error {
public:
    using Error::Error;
};

// A point or function applied outside its domain, e.g. a symbol table on a torus point.
class DomainError : public Error {
public:
    using Error::Error;
};

// Operation not defined for this kind of dynamics.
class UnsupportedDynamics : public Error {
public:
    using Error::Error;
};

// Precondition of a witness or translate construction not met.
class GuardError : public Error {
public:
    using Error::Error;
};

// No admissible offset above the 2^-64 grid resolution.
class ResolutionExhausted : public Error {
public:
    using Error::Error;
};

// Upper bound on the number of elements in any single orbit or potential window.
inline constexpr long long kMaxWindowElements = 1LL << 28;

}  // namespace ergospec
