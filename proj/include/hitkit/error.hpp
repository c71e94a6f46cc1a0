#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hitkit {

// Precondition violations: bad arguments, points outside a domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Argument sits on a pole of a Gamma factor or a hypergeometric parameter.
struct PoleError : DomainError {
    using DomainError::DomainError;
};

// Anything that failed for numerical rather than logical reasons.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OverflowError : NumericalError {
    using NumericalError::NumericalError;
};

// Series or quadrature ran out of budget. Carries what it had.
struct NonConvergence : NumericalError {
    double partial = NAN;
    double err_est = NAN;
    NonConvergence(const std::string& what, double partial_value = NAN, double err = NAN)
        : NumericalError(what), partial(partial_value), err_est(err) {}
};

inline void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

} // namespace hitkit
