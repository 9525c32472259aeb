#include "tlscond/error.hpp"

#include <cstdio>

namespace tlscond {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoSolutionDirection: return "NoSolutionDirection";
    case ErrorCode::NonGeneric: return "NonGeneric";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateSolution: return "DegenerateSolution";
    case ErrorCode::ConsistentSystem: return "ConsistentSystem";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AlphaNearOne: return "AlphaNearOne";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotAvailable: return "NotAvailable";
    case ErrorCode::NonGenericUnderPerturbation: return "NonGenericUnderPerturbation";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace tlscond
