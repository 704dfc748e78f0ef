#pragma once

#include <stdexcept>
#include <string>

namespace qmetric {

// Error taxonomy shared by the library and the CLI.  Every error carries a
// short stable code (used by the CLI for machine-readable reporting) plus a
// human message with enough context to locate the offending input.

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Mismatched block structure, dimension vectors, or operand shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error("E_SHAPE", msg) {}
};

// Input outside the mathematical domain of an operation (non self-adjoint
// element where one is required, metric axiom violation, bad trace weights).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("E_DOMAIN", msg) {}
};

// Index or level out of range.
class RangeError : public Error {
public:
    explicit RangeError(const std::string& msg) : Error("E_RANGE", msg) {}
};

// Problem size beyond a documented cap.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& msg) : Error("E_CAPACITY", msg) {}
};

// Iterative procedure failed to reach its tolerance within its budget.
// Carries the best bounds obtained so far when the caller provides them.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg)
        : Error("E_CONVERGENCE", msg) {}
    ConvergenceError(const std::string& msg, double lo, double hi)
        : Error("E_CONVERGENCE", msg), lower(lo), upper(hi), has_bounds(true) {}
    double lower = 0.0;
    double upper = 0.0;
    bool has_bounds = false;
};

// Malformed input file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error("E_PARSE", msg) {}
};

// Invariant violation that should not be reachable from valid inputs.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& msg) : Error("E_INTERNAL", msg) {}
};

} // namespace qmetric
