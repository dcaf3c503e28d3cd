#ifndef QACAT_ERROR_HPP
#define QACAT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qacat {

enum class ErrorCode {
  EmptyText,
  DuplicateFactKey,
  InvalidFact,
  ModeMismatch,
  OracleFailure,
  DegenerateInput,
  NonConvergent,
  NotProcessed,
  NotAnswerable,
  EmptyDocument,
  BrokenTrace,
  EmptyInput,
  UnknownNode,
  InvalidDag,
  TooLarge,
  NonHierarchical,
  InvalidSummary,
  OverlapWithExisting,
  UnknownAttachNode,
  ZeroLength,
  EmptyCategory,
  UnknownStrategy,
  DimensionMismatch,
  LabelMismatch,
  InsufficientStructure,
  MalformedTask,
  InvalidArgument,
  ConfigError,
  ParseError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::DuplicateFactKey: return "DuplicateFactKey";
    case ErrorCode::InvalidFact: return "InvalidFact";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::NotProcessed: return "NotProcessed";
    case ErrorCode::NotAnswerable: return "NotAnswerable";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::BrokenTrace: return "BrokenTrace";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidDag: return "InvalidDag";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NonHierarchical: return "NonHierarchical";
    case ErrorCode::InvalidSummary: return "InvalidSummary";
    case ErrorCode::OverlapWithExisting: return "OverlapWithExisting";
    case ErrorCode::UnknownAttachNode: return "UnknownAttachNode";
    case ErrorCode::ZeroLength: return "ZeroLength";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::InsufficientStructure: return "InsufficientStructure";
    case ErrorCode::MalformedTask: return "MalformedTask";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every module reports failures through this one exception type; the code
/// selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

/// 0 ok, 2 config/input error, 3 oracle failure, 4 non-convergence, 1 anything else.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
      return 2;
    case ErrorCode::OracleFailure:
      return 3;
    case ErrorCode::NonConvergent:
      return 4;
    default:
      return 1;
  }
}

}  // namespace qacat

#endif  // QACAT_ERROR_HPP
