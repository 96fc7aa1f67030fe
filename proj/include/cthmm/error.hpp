#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cthmm {

enum class ErrorKind {
  NonSquareInput,
  NegativeOffDiagonal,
  ExpmInaccuracy,
  NonPositiveInterval,
  UnknownFeature,
  NonCausalQuery,
  StructureNotChain,
  DimensionMismatch,
  DegenerateOccupancy,
  TooFewPatients,
  EmptyCohort,
  NoHeldOutObservations,
  ParseError,
  DuplicateTimestamp,
  UnknownColumn,
  VersionMismatch,
  InvariantViolation,
  InvalidArgument,
  IoError,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquareInput: return "NonSquareInput";
    case ErrorKind::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorKind::ExpmInaccuracy: return "ExpmInaccuracy";
    case ErrorKind::NonPositiveInterval: return "NonPositiveInterval";
    case ErrorKind::UnknownFeature: return "UnknownFeature";
    case ErrorKind::NonCausalQuery: return "NonCausalQuery";
    case ErrorKind::StructureNotChain: return "StructureNotChain";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateOccupancy: return "DegenerateOccupancy";
    case ErrorKind::TooFewPatients: return "TooFewPatients";
    case ErrorKind::EmptyCohort: return "EmptyCohort";
    case ErrorKind::NoHeldOutObservations: return "NoHeldOutObservations";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace cthmm
