#include "nvw/error.hpp"

namespace nvw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::DisjointDomains: return "DisjointDomains";
    case ErrorCode::UnsupportedMeasure: return "UnsupportedMeasure";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::IncompatibleData: return "IncompatibleData";
    case ErrorCode::NotTimeZero: return "NotTimeZero";
    case ErrorCode::InvalidRelabeling: return "InvalidRelabeling";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::UnclassifiedPoint: return "UnclassifiedPoint";
    case ErrorCode::AtomPresent: return "AtomPresent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace nvw
