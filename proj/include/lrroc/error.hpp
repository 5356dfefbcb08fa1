#pragma once

#include <stdexcept>
#include <string>

namespace lrroc {

enum class ErrorCode {
    InvalidData,
    DegenerateSupport,
    NonPositiveValues,
    IndexOutOfRange,
    NonConvergence,
    DomainError,
    ZeroBandwidth,
    DegenerateVariance,
    ZeroTruth,
    TooManyFailures,
    InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::DegenerateSupport: return "DegenerateSupport";
    case ErrorCode::NonPositiveValues: return "NonPositiveValues";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroBandwidth: return "ZeroBandwidth";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// All estimation failures surface as this exception; code() tells them apart.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lrroc
