#pragma once

#include <stdexcept>
#include <string>

namespace qvo {

enum class ErrorCode {
  DivisionByZero,
  InvalidArgument,
  PoleAtQ0,
  Overflow,
  NotSymmetrizable,
  NotFiniteType,
  RankMismatch,
  NotDominantIntegral,
  InfiniteDimensional,
  NonUniqueSolution,
  Inconsistent,
  NotGeneric,
  TruncationTooSmall,
  Singular,
  DecompositionFailed,
  ShapeMismatch,
  IndexOutOfRange,
  ParseError,
  ArityError,
  TypeMismatch,
  InfiniteDualError,
  BoundaryMismatch,
  MoveNotApplicable,
  ConfigError,
  UnknownName,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

}  // namespace qvo
