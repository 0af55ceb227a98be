#pragma once

#include <stdexcept>
#include <string>

namespace formlab {

// Base of everything thrown on purpose by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stated precondition or invariant of an operation does not hold for the
// given input.  These map to exit code 1 in the CLI.
struct ViolationError : Error {
    using Error::Error;
};

struct NonDegenerateViolation : ViolationError {
    using ViolationError::ViolationError;
};

struct PrimitivityViolation : ViolationError {
    using ViolationError::ViolationError;
};

struct IsotropyViolation : ViolationError {
    using ViolationError::ViolationError;
};

// One-parameter subgroup generator of the wrong kind (not nilpotent /
// not traceless diagonal).
struct KindViolation : ViolationError {
    using ViolationError::ViolationError;
};

// An operation was invoked outside its domain of validity (e.g. a maximality
// check that only makes sense for n >= 3).
struct HypothesisViolation : ViolationError {
    using ViolationError::ViolationError;
};

struct PreconditionViolation : ViolationError {
    using ViolationError::ViolationError;
};

// Numerical trouble that is not the caller's fault: lost precision, failed
// renormalisation, reduction that cannot certify its output.
struct ConditioningError : Error {
    using Error::Error;
};

// Scalars from incompatible domains were combined (e.g. sqrt(2) with sqrt(3)).
struct ScalarDomainError : ViolationError {
    using ViolationError::ViolationError;
};

// Malformed textual input (form files, CLI/config values).  Exit code 2.
struct FormParseError : Error {
    using Error::Error;
};

// The p-adic decision procedure ran out of precision without certifying
// either answer; carries the level it searched to.
struct PadicUndecided : Error {
    int precision_exponent;
    explicit PadicUndecided(int k)
        : Error("p-adic isotropy undecided at precision exponent " + std::to_string(k)),
          precision_exponent(k) {}
};

}  // namespace formlab
