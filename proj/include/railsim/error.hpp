#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace railsim {

enum class ErrorCode {
    kNonFiniteInput,
    kInvalidParams,
    kInvalidProfile,
    kDelaysUndefined,
    kIntegrationDiverged,
    kStepSizeUnderflow,
    kInvalidStepControl,
    kInvalidPlan,
    kSingularMatrix,
    kResonanceUndamped,
    kInsufficientWindow,
    kConfig,
    kEmptySeries,
    kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

}  // namespace railsim
