#pragma once

#include <stdexcept>
#include <string>

namespace svshrink {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Hard (or soft) threshold placed at or inside the noise bulk; AMSE is not finite there.
class BulkThresholdError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedAspectRatio : public DomainError {
 public:
  using DomainError::DomainError;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

// Matrix too small for the median-based noise estimate.
class TooSmall : public Error {
 public:
  using Error::Error;
};

class RankTooLarge : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class SpectrumTooLong : public Error {
 public:
  using Error::Error;
};

class InvalidSpectrum : public Error {
 public:
  using Error::Error;
};

// Malformed CSV, config or rule text.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace svshrink
