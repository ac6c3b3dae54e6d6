#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace freeforce {

enum class ErrorCode {
    InvalidDesign,
    InvalidAngle,
    DegenerateState,
    OverExtended,
    NegativePressure,
    PressureLimit,
    NonUnitAxis,
    KinematicsInvalid,
    EmptySelection,
    TooManyFrees,
    DimensionMismatch,
    WrongDimension,
    EmptyGrid,
    ParseError,
    ValidationError,
    MissingBaseline,
    LengthMismatch,
    EmptyInput,
    IoError,
    UsageError,
};

constexpr std::string_view error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidDesign: return "InvalidDesign";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::OverExtended: return "OverExtended";
    case ErrorCode::NegativePressure: return "NegativePressure";
    case ErrorCode::PressureLimit: return "PressureLimit";
    case ErrorCode::NonUnitAxis: return "NonUnitAxis";
    case ErrorCode::KinematicsInvalid: return "KinematicsInvalid";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::TooManyFrees: return "TooManyFrees";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
    }
    return "Unknown";
}

/// Library-wide exception. what() always starts with the error name, e.g.
/// "PressureLimit: free2 pressure 2e5 Pa exceeds p_max 103400 Pa", or
/// "ValidationError(InvalidDesign): ..." when a cause is attached.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(format(code, std::nullopt, message)), code_(code) {}

    Error(ErrorCode code, ErrorCode cause, const std::string& message)
        : std::runtime_error(format(code, cause, message)), code_(code), cause_(cause) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<ErrorCode> cause() const noexcept { return cause_; }

private:
    static std::string format(ErrorCode code, std::optional<ErrorCode> cause,
                              const std::string& message) {
        std::string out(error_name(code));
        if (cause) {
            out += '(';
            out += error_name(*cause);
            out += ')';
        }
        out += ": ";
        out += message;
        return out;
    }

    ErrorCode code_;
    std::optional<ErrorCode> cause_;
};

} // namespace freeforce
