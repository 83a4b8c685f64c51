#pragma once

#include <stdexcept>
#include <string>

namespace potlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define POTLAB_ERROR(Name)                  \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

POTLAB_ERROR(NonIntegerMass)
POTLAB_ERROR(EmptyMeasure)
POTLAB_ERROR(CutInfeasible)
POTLAB_ERROR(ZeroMass)
POTLAB_ERROR(WindowEmpty)
POTLAB_ERROR(QuadratureFailure)
POTLAB_ERROR(DivergenceDetected)
POTLAB_ERROR(IllConditioned)
POTLAB_ERROR(DomainError)

#undef POTLAB_ERROR

/// Malformed scenario or measure document. `where` names the offending
/// field path (and line when known).
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace potlab
