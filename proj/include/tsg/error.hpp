#pragma once

#include <stdexcept>
#include <string>

namespace tsg {

enum class ErrorKind {
  kParse,
  kDimensionMismatch,
  kInvalidArgument,
  kCoalitionTooLarge,
  kInfeasible,
  kAsymmetric,
  kLpFailure,
  kNestingFailure,
  kZeroTotal,
  kIo,
};

const char* to_string(ErrorKind kind);

/// All library failures are reported through this exception type; `kind()`
/// lets callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tsg
