#pragma once

#include <stdexcept>
#include <string>

namespace otg {

// Error taxonomy mirrors the CLI exit codes: usage errors are caught by the
// argument parser, everything below maps to exit code 3 (numerical failure)
// unless a command treats it as a reported finding.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension/shape mismatches and empty inputs.
struct DimensionError : Error {
    using Error::Error;
};

// A primitive was evaluated outside its real domain (log of <= 0, division by
// ~0, sqrt of negative). Carries the offending primitive and value.
struct NumericalDomainError : Error {
    std::string primitive;
    double value;
    NumericalDomainError(std::string prim, double v, const std::string& msg)
        : Error(msg), primitive(std::move(prim)), value(v) {}
};

// A point failed a potential's domain predicate or positive-definiteness check.
struct OutOfDomainError : Error {
    using Error::Error;
};

// Gradient-map inversion (Newton) failed to converge; carries best residual.
struct InversionError : Error {
    double best_residual;
    InversionError(const std::string& msg, double res) : Error(msg), best_residual(res) {}
};

// Metric factorization failure (min eigenvalue below threshold).
struct DegenerateMetricError : Error {
    using Error::Error;
};

// det(c_{x,y}) ~ 0: Theorem-style condition (4) violation.
struct SingularCostError : Error {
    using Error::Error;
};

// Iterative solver did not reach its tolerance within budget.
struct ConvergenceError : Error {
    double achieved;
    ConvergenceError(const std::string& msg, double got) : Error(msg), achieved(got) {}
};

struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t at) : Error(msg), offset(at) {}
};

}  // namespace otg
