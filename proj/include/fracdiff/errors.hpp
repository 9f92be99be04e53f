#pragma once

#include <stdexcept>
#include <string>

namespace fracdiff {

/// Scalar argument outside its admissible range (orders, exponents, sizes).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Input data violates a documented precondition (non-finite samples, ...).
class InputDomainError : public std::invalid_argument {
 public:
  explicit InputDomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Grid too coarse or shapes inconsistent for the requested operation.
class GridError : public std::runtime_error {
 public:
  explicit GridError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation point cannot be served by the tabulated data.
class OutOfRangeError : public std::runtime_error {
 public:
  explicit OutOfRangeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Periodic box too small for the requested tail accuracy.
class DomainTooSmallError : public std::runtime_error {
 public:
  DomainTooSmallError(const std::string& msg, double suggested)
      : std::runtime_error(msg), suggested_box_length(suggested) {}
  double suggested_box_length;
};

class SerializationError : public std::runtime_error {
 public:
  explicit SerializationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A norm or average came out non-finite.
class OverflowError : public std::runtime_error {
 public:
  explicit OverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Ratio denominator vanished everywhere.
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Internal quadrature produced an inconsistent value.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fracdiff
