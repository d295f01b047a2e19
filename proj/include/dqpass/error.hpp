#pragma once

#include <stdexcept>
#include <string>

namespace dqpass {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, missing fields, unparsable files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A parameter violates its documented domain (e.g. a non-positive gain).
class InvalidParameter : public InputError {
 public:
  using InputError::InputError;
};

class BadRange : public InputError {
 public:
  using InputError::InputError;
};

/// jΩ coincides (numerically) with an eigenvalue of A.
class SingularResolvent : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// v_Do = v_Qo = 0: the polar interface transforms are undefined.
class DegenerateVoltage : public InputError {
 public:
  using InputError::InputError;
};

/// 2 V_o cos(zeta_o) = E_g: the synchronous-machine closed forms blow up.
class SingularOperatingPoint : public InputError {
 public:
  using InputError::InputError;
};

/// Supplied terminal currents disagree with the device's own steady state.
class InconsistentOperatingPoint : public InputError {
 public:
  using InputError::InputError;
};

class SingularLoad : public InputError {
 public:
  using InputError::InputError;
};

/// Feedthrough is singular, so the inverse system is not proper.
class ImproperInverse : public Error {
 public:
  using Error::Error;
};

/// The device cannot export the requested Q-V contribution.
class InsufficientKqv : public Error {
 public:
  InsufficientKqv(const std::string& what, double available)
      : Error(what), available_(available) {}

  /// Minimum of Re J_s(2,2) over the low-frequency grid.
  double available() const noexcept { return available_; }

 private:
  double available_;
};

class GridHitsPole : public Error {
 public:
  using Error::Error;
};

class NotRational : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class ConjugationViolation : public InputError {
 public:
  using InputError::InputError;
};

class DisconnectedNetwork : public InputError {
 public:
  using InputError::InputError;
};

class UnknownBus : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace dqpass
