#pragma once

#include <stdexcept>
#include <string>

namespace jostlab {

enum class ErrorKind {
  InvalidSpectralPoint,
  InvalidArgument,
  DomainError,
  TailDivergent,
  NoThreshold,
  QuadratureFailure,
  NoConvergence,
  TruncationTooSmall,
  StepUnderflow,
  NoSignChange,
  ThetaVanishes,
  GridMismatch,
  NotShortRange,
  AtEigenvalue,
  PhaseUnwrapAmbiguity,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jostlab
