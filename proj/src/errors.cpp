#include "emshock/errors.hpp"

namespace emshock {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::InvalidDegreesOfFreedom: return "InvalidDegreesOfFreedom";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::NonMonthlyDates: return "NonMonthlyDates";
    case ErrorKind::InteriorMissing: return "InteriorMissing";
    case ErrorKind::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorKind::MissingTick: return "MissingTick";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::InsufficientObservations: return "InsufficientObservations";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoVariationLeft: return "NoVariationLeft";
    case ErrorKind::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NegativeMultiplier: return "NegativeMultiplier";
    case ErrorKind::InfeasibleConsumption: return "InfeasibleConsumption";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::RegimeMismatch: return "RegimeMismatch";
    case ErrorKind::ConfigPathMissing: return "ConfigPathMissing";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace emshock
