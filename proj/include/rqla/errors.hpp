#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rqla {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes or qubit counts that do not line up.
struct DimensionError : Error {
  using Error::Error;
};

// Inputs outside their documented ranges (non-Hermitian, bad eps, ...).
struct ValidationError : Error {
  using Error::Error;
};

// A builder could not certify its output.
struct ConstructionError : Error {
  using Error::Error;
};

struct PlanningError : Error {
  PlanningError(const std::string& what, std::uint64_t required)
      : Error(what), required_shots(required) {}
  std::uint64_t required_shots;
};

// Q <= 0 from the norm subroutine. Never clamped.
struct DegenerateNormalization : Error {
  DegenerateNormalization(const std::string& what, double q)
      : Error(what), estimate(q) {}
  double estimate;
};

}  // namespace rqla
