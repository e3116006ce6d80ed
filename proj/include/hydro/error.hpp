#pragma once

#include <stdexcept>
#include <string>

namespace hydro {

enum class ErrorCode {
  ZeroLaneRate,
  NotWeaklyIrreducible,
  NoReversibleMeasure,
  ExponentTooSmall,
  OutOfRange,
  GridTooCoarse,
  UnstableStep,
  NewtonDivergence,
  DisjointWindows,
  WindowTooSmall,
  ProfileOutOfRange,
  ConfigInvalid,
  ModelInvalid,
  IoError,
  SchemaMismatch,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hydro
