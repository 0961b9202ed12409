#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swd {

/// Failure categories raised by the library. Stable tokens are returned by to_string().
enum class ErrorKind {
  SingularMatrix,
  NotContracting,
  InvalidArgument,
  DimensionMismatch,
  UnknownLabel,
  DuplicateLabel,
  EmptyTransitions,
  NonpositiveDwell,
  InvalidSignal,
  InvalidEpsilon,
  InvalidMu,
  UnsupportedCertificate,
  UnsupportedDimension,
  HeterogeneousCertificates,
  EmptyConfiguration,
  NoThreshold,
  NonfiniteState,
  SignalMismatch,
  InsufficientSwitches,
  ParseError,
  ValidationError,
  IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace swd
