#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ensheat {

/// Malformed text input (mesh files, config files, expressions).
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cholesky hit a nonpositive pivot.
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(const std::string& what, std::size_t pivot)
        : std::runtime_error(what), pivot_(pivot) {}

    /// Row/column of the offending pivot in the caller's (unpermuted) numbering.
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// The factor handed to a stepper was built from a different matrix.
class StaleFactorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ensheat
