#pragma once

#include <stdexcept>
#include <string>

namespace gevrey {

// Bad user input: malformed config files, invalid CLI arguments, missing
// artifacts for a requested pipeline stage.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation failed numerically (as opposed to being misconfigured).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The time stepper produced a nonfinite state.
struct BlowUpError : NumericalError {
  BlowUpError(const std::string& what, double t) : NumericalError(what), last_valid_time(t) {}
  double last_valid_time;
};

// An improper-integral tail could not be fitted (integrand not decaying).
struct TailFitError : NumericalError {
  using NumericalError::NumericalError;
};

// A verifier needs a longer trajectory than the one provided.
struct HorizonError : NumericalError {
  using NumericalError::NumericalError;
};

// A configured verification check did not hold.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gevrey
