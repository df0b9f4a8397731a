#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scc {

enum class ErrorCode {
  NonDivisibleWidth,
  InvalidDensity,
  ShapeMismatch,
  ParseError,
  UnsupportedField,
  IoError,
  InconsistentParams,
  WeightConstraintViolated,
  InvalidDistribution,
  InvalidWorker,
  WrongSubsetSize,
  SingularSystem,
  RankDeficient,
  BudgetExceeded,
  InvalidProfile,
  InvalidBoundary,
  PlanMismatch,
  NotEnoughSurvivors,
  TooManyClasses,
  DeltaOutOfRange,
  SubsetTooLarge,
  SideSizeMismatch,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonDivisibleWidth: return "NonDivisibleWidth";
    case ErrorCode::InvalidDensity: return "InvalidDensity";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedField: return "UnsupportedField";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InconsistentParams: return "InconsistentParams";
    case ErrorCode::WeightConstraintViolated: return "WeightConstraintViolated";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::InvalidWorker: return "InvalidWorker";
    case ErrorCode::WrongSubsetSize: return "WrongSubsetSize";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InvalidBoundary: return "InvalidBoundary";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::NotEnoughSurvivors: return "NotEnoughSurvivors";
    case ErrorCode::TooManyClasses: return "TooManyClasses";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
    case ErrorCode::SideSizeMismatch: return "SideSizeMismatch";
  }
  return "Unknown";
}

/// Every failure raised by the library. The message is prefixed with the
/// code name so CLI users see e.g. "WeightConstraintViolated: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scc
