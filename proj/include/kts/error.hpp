#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kts {

enum class ErrorCode {
  InvalidArgument,
  ZeroNormRow,
  TooManyCandidates,
  IndexOutOfRange,
  InfeasibleSegmentCount,
  NonPositivePenaltyWeight,
  NonPositiveRate,
  NonPositiveK,
  CandidateCountMismatch,
  MalformedHeader,
  RaggedRows,
  NonFiniteValue,
  SchemaMismatch,
  InvariantViolation,
  IoError,
  InstanceTooLarge,
  InfeasibleConfig,
  UnsortedInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::TooManyCandidates: return "TooManyCandidates";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InfeasibleSegmentCount: return "InfeasibleSegmentCount";
    case ErrorCode::NonPositivePenaltyWeight: return "NonPositivePenaltyWeight";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NonPositiveK: return "NonPositiveK";
    case ErrorCode::CandidateCountMismatch: return "CandidateCountMismatch";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; code() tells
/// callers which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kts
