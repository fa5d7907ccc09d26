#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plant {

enum class Errc {
  EmptyPriceSet,
  DemandExceedsCap,
  OrphanProduct,
  NegativeEntry,
  DimensionMismatch,
  TraceExhausted,
  NotErgodic,
  BadProcessSpec,
  InvariantViolation,
  InitOutOfRange,
  ThetaBelowSafe,
  Infeasible,
  Unbounded,
  ActionSpaceTooLarge,
  InstanceTooLarge,
  NormalizationFailure,
  TargetOutsideHull,
  ParseError,
  ValidationError,
};

std::string_view to_string(Errc code);

// Single exception type for the library; callers switch on code().
class PlantError : public std::runtime_error {
 public:
  PlantError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace plant
