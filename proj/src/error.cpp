#include "nrpb/error.hpp"

namespace nrpb {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidEmbedding: return "invalid-embedding";
    case ErrorCode::InvalidSpace: return "invalid-space";
    case ErrorCode::InvalidRate: return "invalid-rate";
    case ErrorCode::InvalidOperands: return "invalid-operands";
    case ErrorCode::DegeneratePhase: return "degenerate-phase";
    case ErrorCode::UnsupportedAsymmetry: return "unsupported-asymmetry";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::NonUniqueSteadyState: return "non-unique-steady-state";
    case ErrorCode::StepTooLarge: return "step-too-large";
    case ErrorCode::UndefinedTransmission: return "undefined-transmission";
    case ErrorCode::InsufficientPopulation: return "insufficient-population";
    case ErrorCode::UndefinedRatio: return "undefined-ratio";
    case ErrorCode::ResonanceSingularity: return "resonance-singularity";
    case ErrorCode::SingularDenominator: return "singular-denominator";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::GridCapExceeded: return "grid-cap-exceeded";
    case ErrorCode::UnknownScenario: return "unknown-scenario";
    }
    return "unknown";
}

} // namespace nrpb
