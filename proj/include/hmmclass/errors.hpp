#pragma once

#include <stdexcept>
#include <string>

namespace hmmclass {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, invalid parameters, dimension mixups.
struct ConfigError : Error {
  using Error::Error;
};

// Math-level failure on otherwise valid input.
struct NumericError : Error {
  using Error::Error;
};

struct DimensionMismatch : ConfigError {
  using ConfigError::ConfigError;
};

struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

struct LabelOutOfRange : ConfigError {
  using ConfigError::ConfigError;
};

struct WindowLengthMismatch : ConfigError {
  using ConfigError::ConfigError;
};

// Some transition or emission probability is zero, so the ratio constants
// (alpha, eta, ...) are infinite and no bound can be computed.
struct PositivityViolated : NumericError {
  using NumericError::NumericError;
};

struct NonUniqueStationary : NumericError {
  using NumericError::NumericError;
};

// All forward weights vanished exactly; the conditioning window has
// probability zero under the model.
struct EvidenceUnderflow : NumericError {
  using NumericError::NumericError;
};

struct InconsistentConditioning : NumericError {
  using NumericError::NumericError;
};

struct EnumerationTooLarge : NumericError {
  using NumericError::NumericError;
};

struct UnsupportedEmission : NumericError {
  using NumericError::NumericError;
};

struct IntegrationUnavailable : NumericError {
  using NumericError::NumericError;
};

}  // namespace hmmclass
