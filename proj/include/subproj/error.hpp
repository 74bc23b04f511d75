#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subproj {

enum class ErrorKind {
  ZeroVector,
  DimensionMismatch,
  NonFiniteValue,
  InvalidArgument,
  DomainError,
  EmptySubdifferential,
  NotTwiceDifferentiable,
  NotDifferentiableHere,
  NegativeBaseError,
  NonMonotonePhi,
  NotScaledOrthogonal,
  InconsistentMinimizer,
  JointSelectionUnavailable,
  UnsupportedAtom,
  ZeroSubgradient,
  RelaxationOutOfRange,
  InfeasibleWitness,
  DegenerateMoreau,
  NotPositiveHere,
  ZeroFunctionValue,
  EmptySample,
  NoLevelSetOracle,
  InvalidControl,
  StalledStep,
  SchemaError,
  NotSerializable,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the ErrorKind tags;
/// what() reads "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& detail);

}  // namespace subproj
