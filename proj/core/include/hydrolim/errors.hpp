#pragma once

#include <stdexcept>
#include <string>

namespace hydrolim {

// User-facing configuration problem (bad preset name, invalid parameter,
// unknown JSON key).  The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure (series/quadrature did not converge, NaN in a state
// vector, rejection sampler starved, CFL violation).  CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CFL rejection carries the admissible step so callers can retry.
struct CflViolation : NumericError {
  CflViolation(const std::string& what, double admissible)
      : NumericError(what), admissible_dt(admissible) {}
  double admissible_dt;
};

}  // namespace hydrolim
