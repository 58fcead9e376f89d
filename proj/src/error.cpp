#include "railsim/error.hpp"

namespace railsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kNonFiniteInput: return "non-finite-input";
        case ErrorCode::kInvalidParams: return "invalid-params";
        case ErrorCode::kInvalidProfile: return "invalid-profile";
        case ErrorCode::kDelaysUndefined: return "delays-undefined";
        case ErrorCode::kIntegrationDiverged: return "integration-diverged";
        case ErrorCode::kStepSizeUnderflow: return "step-size-underflow";
        case ErrorCode::kInvalidStepControl: return "invalid-step-control";
        case ErrorCode::kInvalidPlan: return "invalid-plan";
        case ErrorCode::kSingularMatrix: return "singular-matrix";
        case ErrorCode::kResonanceUndamped: return "resonance-undamped";
        case ErrorCode::kInsufficientWindow: return "insufficient-window";
        case ErrorCode::kConfig: return "config";
        case ErrorCode::kEmptySeries: return "empty-series";
        case ErrorCode::kIo: return "io";
    }
    return "unknown";
}

}  // namespace railsim
