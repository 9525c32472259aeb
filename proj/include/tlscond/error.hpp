#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlscond {

/// Machine-readable failure categories. Every exception thrown by the library
/// is a tlscond::Error carrying one of these.
enum class ErrorCode {
  InvalidInput,
  SingularSystem,
  NoSolutionDirection,
  NonGeneric,
  RankDeficient,
  DegenerateSolution,
  ConsistentSystem,
  TooLarge,
  AlphaNearOne,
  NotApplicable,
  NotAvailable,
  NonGenericUnderPerturbation,
  InsufficientData,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Short "%.3g" rendering of a number for error messages.
std::string format_short(double v);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tlscond
