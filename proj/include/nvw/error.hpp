#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nvw {

enum class ErrorCode {
  GridTooSmall,
  NegativeWeight,
  DisjointDomains,
  UnsupportedMeasure,
  EmptyGrid,
  IncompatibleData,
  NotTimeZero,
  InvalidRelabeling,
  BadRange,
  NonFiniteValue,
  TimeOutOfRange,
  DomainTooSmall,
  OutOfWindow,
  UnclassifiedPoint,
  AtomPresent,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace nvw
