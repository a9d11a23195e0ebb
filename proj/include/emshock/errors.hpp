#pragma once

#include <stdexcept>
#include <string>

namespace emshock {

// Machine-parsable failure classes surfaced through the CLI exit path.
enum class ErrorKind {
  NotPositiveDefinite,
  NotSymmetric,
  InvalidDegreesOfFreedom,
  EmptyInput,
  SchemaMismatch,
  NonMonthlyDates,
  InteriorMissing,
  NonPositiveLevel,
  MissingTick,
  ZeroVariance,
  InsufficientObservations,
  RankDeficient,
  NoVariationLeft,
  DegenerateNormalization,
  NoBracket,
  NegativeMultiplier,
  InfeasibleConsumption,
  ConstraintViolated,
  RegimeMismatch,
  ConfigPathMissing,
  ConfigInvalid,
  IoFailure,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace emshock
