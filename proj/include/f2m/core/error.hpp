#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace f2m {

enum class ErrorCode {
  InvalidInput,
  DegenerateInput,
  FormatError,
  BehindCamera,
  DegenerateSample,
  InsufficientData,
  NonConvergence,
  LocalizationFailure,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::DegenerateInput: return "degenerate input";
    case ErrorCode::FormatError: return "format error";
    case ErrorCode::BehindCamera: return "point behind camera";
    case ErrorCode::DegenerateSample: return "degenerate sample";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::LocalizationFailure: return "localization failure";
    case ErrorCode::IoError: return "i/o error";
  }
  return "unknown error";
}

/// Every failure raised by the toolkit carries one of the codes above so
/// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace f2m
