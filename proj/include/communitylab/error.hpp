#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace communitylab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (non-prime modulus, non-integral quota, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An exhaustive search or explicit build would exceed its configured budget.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, double required, double budget)
        : Error(what + ": requires " + format(required) + " but budget is " + format(budget)),
          required_(required), budget_(budget) {}

    double required() const noexcept { return required_; }
    double budget() const noexcept { return budget_; }

private:
    static std::string format(double v) {
        if (v < 1e15) return std::to_string(static_cast<std::uint64_t>(v));
        return std::to_string(v);
    }
    double required_;
    double budget_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace communitylab
