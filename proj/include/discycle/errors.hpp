#pragma once

#include <stdexcept>
#include <string>

namespace discycle {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  SingularSystem,
  IllConditioned,
  DegenerateDenominator,
  ComplexRoots,
  DegenerateVariance,
  ZeroDivisor,
  ExponentialBlowup,
  UnstableBothWays,
  NoStableOrientation,
  NonConvergence,
};

// Base of every exception thrown by the library. The code lets the C layer
// map failures onto status values without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define DISCYCLE_DEFINE_ERROR(Name)                                          \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorCode::Name, what) {} \
  };

DISCYCLE_DEFINE_ERROR(InvalidArgument)
DISCYCLE_DEFINE_ERROR(SingularSystem)
DISCYCLE_DEFINE_ERROR(IllConditioned)
DISCYCLE_DEFINE_ERROR(DegenerateDenominator)
DISCYCLE_DEFINE_ERROR(ComplexRoots)
DISCYCLE_DEFINE_ERROR(DegenerateVariance)
DISCYCLE_DEFINE_ERROR(ZeroDivisor)
DISCYCLE_DEFINE_ERROR(ExponentialBlowup)
DISCYCLE_DEFINE_ERROR(UnstableBothWays)
DISCYCLE_DEFINE_ERROR(NoStableOrientation)
DISCYCLE_DEFINE_ERROR(NonConvergence)

#undef DISCYCLE_DEFINE_ERROR

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace discycle
