#pragma once

#include <stdexcept>
#include <string>

namespace mave {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two operands built over different parameter-symbol sets.
class RingMismatchError : public Error {
public:
    using Error::Error;
};

// Invalid input (case invariants, preconditions, malformed config).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Substitution rule set does not terminate.
class CycleError : public Error {
public:
    using Error::Error;
};

// Operation outside the minimal nonlocal calculus (apply/adjoint on an
// unsupported nonlocal operator).
class UnsupportedOperationError : public Error {
public:
    using Error::Error;
};

// Composition would need nonlocal nesting depth > 1.
class NormalizationError : public Error {
public:
    using Error::Error;
};

// Factor-set variant incompatible with the coefficient case.
class VariantError : public Error {
public:
    using Error::Error;
};

// Hamiltonian c9 constraint violated; carries the expected value as text.
class ConstraintError : public Error {
public:
    ConstraintError(const std::string& msg, std::string expected)
        : Error(msg), expected_c9(std::move(expected)) {}
    std::string expected_c9;
};

// Two supposedly equivalent computations disagree.
class InternalConsistencyError : public Error {
public:
    using Error::Error;
};

// Density cannot be evaluated in the requested context (explicit z on the
// torus, formal parameters, t-derivatives on the grid).
class DomainError : public Error {
public:
    using Error::Error;
};

// Simulation left the range of representable values.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& msg, double t) : Error(msg), last_valid_time(t) {}
    double last_valid_time;
};

} // namespace mave
