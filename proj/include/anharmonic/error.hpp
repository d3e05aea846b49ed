#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anharmonic {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. position() is the 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Evaluation outside a function's real domain (ln of a non-positive value,
// division by zero, non-integer power of a negative base, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid argument combination, including exponents the theory excludes.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature failed to meet its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, double worst_lo, double worst_hi)
      : Error(message), worst_lo_(worst_lo), worst_hi_(worst_hi) {}
  double worst_lo() const noexcept { return worst_lo_; }
  double worst_hi() const noexcept { return worst_hi_; }

 private:
  double worst_lo_;
  double worst_hi_;
};

// A Bernoulli denominator vanishes everywhere usable.
class PoleError : public Error {
 public:
  using Error::Error;
};

// The ODE integrator could not continue (step underflow, pole).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, double last_good_t)
      : Error(message), last_good_t_(last_good_t) {}
  double last_good_t() const noexcept { return last_good_t_; }

 private:
  double last_good_t_;
};

}  // namespace anharmonic
