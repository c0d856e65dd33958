#pragma once

#include <stdexcept>
#include <string>

namespace nrpb {

enum class ErrorCode {
    InvalidDimension,
    InvalidEmbedding,
    InvalidSpace,
    InvalidRate,
    InvalidOperands,
    DegeneratePhase,
    UnsupportedAsymmetry,
    NoConvergence,
    NonUniqueSteadyState,
    StepTooLarge,
    UndefinedTransmission,
    InsufficientPopulation,
    UndefinedRatio,
    ResonanceSingularity,
    SingularDenominator,
    InvalidConfig,
    GridCapExceeded,
    UnknownScenario,
};

/// Short machine-readable name, used in CSV error-flag columns.
const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the steady-state and time-propagation solvers; carries the
/// residual that failed the acceptance test.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double residual)
        : Error(ErrorCode::NoConvergence, what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace nrpb
