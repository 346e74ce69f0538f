#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pellsos {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A polynomial or index needs moments beyond the order a sequence carries.
class DegreeOverflow : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

/// A quadrature rule was asked for a degree it cannot integrate exactly.
class InsufficientOrder : public Error {
public:
  using Error::Error;
};

class SamplingError : public Error {
public:
  using Error::Error;
};

/// Raised when an SOS identity that was promised does not hold.
class IdentityViolation : public Error {
public:
  using Error::Error;
};

/// A matrix expected to be positive definite failed its factorization.
class NotPositiveDefinite : public Error {
public:
  NotPositiveDefinite(std::string label, std::size_t pivot, double value)
      : Error("matrix '" + label + "' is not positive definite: pivot " +
              std::to_string(pivot) + " = " + std::to_string(value)),
        label_(std::move(label)), pivot_(pivot), value_(value) {}

  const std::string& label() const noexcept { return label_; }
  std::size_t pivot() const noexcept { return pivot_; }
  double value() const noexcept { return value_; }

private:
  std::string label_;
  std::size_t pivot_;
  double value_;
};

class SolverError : public Error {
public:
  using Error::Error;
};

}  // namespace pellsos
