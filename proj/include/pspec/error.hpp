#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pspec {

enum class ErrorKind {
  InvalidDomain,
  InvalidSpec,
  FeatureTooThin,
  DimensionUnsupported,
  ZeroTrialFunction,
  InvalidExponent,
  NonConvergence,
  EmptySuperlevel,
  EmptySet,
  ConformalCase,
  ExponentOutOfRange,
  DomainError,
  PreconditionViolated,
  MissingParam,
  InvalidConfig,
  NotSymmetric,
  NoInteriorBall,
  NoSignChange,
  ConfigParse,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind` carries the
// machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace pspec
