#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srsim {

/// Malformed or inconsistent run configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Any failure of the numerical machinery (CLI exit status 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepLimitExceeded : public NumericError {
 public:
  StepLimitExceeded(double t, std::size_t steps)
      : NumericError("step limit of " + std::to_string(steps) + " exceeded at t=" + std::to_string(t)),
        time(t) {}
  double time;
};

class NonFiniteState : public NumericError {
 public:
  NonFiniteState(double t, std::size_t component)
      : NumericError("non-finite state component " + std::to_string(component) + " at t=" +
                     std::to_string(t)),
        time(t),
        component(component) {}
  double time;
  std::size_t component;
};

class HermiticityViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Second moments assembled into a Casimir below its physical minimum.
class NegativeCasimir : public NumericError {
 public:
  NegativeCasimir(double s)
      : NumericError("negative collective Casimir S=" + std::to_string(s)), value(s) {}
  double value;
};

class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ZeroDrive : public std::invalid_argument {
 public:
  ZeroDrive() : std::invalid_argument("drive amplitude is zero") {}
};

class DimensionCap : public NumericError {
 public:
  using NumericError::NumericError;
};

class TraceDrift : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Endpoint expectations moved when the Fock cutoff was raised.
class CutoffInadequate : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularDesign : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Pulse fitting failures (CLI exit status 4 for the fit-only command).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoPeak : public FitError {
 public:
  using FitError::FitError;
};

}  // namespace srsim
