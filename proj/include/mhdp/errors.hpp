#pragma once

#include <stdexcept>
#include <string>

namespace mhdp {

enum class ErrorKind {
  InvalidArgument,
  DiscretizationTooSmall,
  EigSolveFailure,
  GridMismatch,
  SOCViolated,
  EpsilonUnreachable,
  NonpositiveCoefficient,
  StepRejectionLimit,
  NonFiniteState,
  NotConverged,
  ParameterConstraintViolated,
  MagneticLeak,
  ConfigMismatch,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind);

/// Base exception for every hard failure raised by the library.  Soft
/// failures (certificates, checks) are reported as data instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DiscretizationTooSmall: return "DiscretizationTooSmall";
    case ErrorKind::EigSolveFailure: return "EigSolveFailure";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SOCViolated: return "SOCViolated";
    case ErrorKind::EpsilonUnreachable: return "EpsilonUnreachable";
    case ErrorKind::NonpositiveCoefficient: return "NonpositiveCoefficient";
    case ErrorKind::StepRejectionLimit: return "StepRejectionLimit";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ParameterConstraintViolated: return "ParameterConstraintViolated";
    case ErrorKind::MagneticLeak: return "MagneticLeak";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace mhdp
