#ifndef CORRFIT_ERROR_HPP
#define CORRFIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace corrfit {

enum class ErrorCode {
  DimensionMismatch,
  SingularMatrix,
  NotPositiveDefinite,
  DegeneratePivot,
  PointAlreadyRemoved,
  NonPositiveSigma,
  InvalidArgument,
  RankDeficientDesign,
  TooFewPoints,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegeneratePivot: return "DegeneratePivot";
    case ErrorCode::PointAlreadyRemoved: return "PointAlreadyRemoved";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace corrfit

#endif
