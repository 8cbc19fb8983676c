#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace triplex {

/// Evaluation point in (t, x, xi) space.
struct Point {
  double t = 0.0;
  double x = 0.0;
  double xi = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when a symbol is evaluated outside its domain (division by zero,
/// sqrt of a negative number, overflow).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class HyperbolicityViolation : public std::runtime_error {
 public:
  HyperbolicityViolation(Point witness, double discriminant)
      : std::runtime_error("discriminant 4a^3-27b^2 = " + std::to_string(discriminant) +
                           " < 0 at (t,x,xi) = (" + std::to_string(witness.t) + ", " +
                           std::to_string(witness.x) + ", " + std::to_string(witness.xi) + ")"),
        witness_(witness),
        discriminant_(discriminant) {}
  Point witness() const noexcept { return witness_; }
  double discriminant() const noexcept { return discriminant_; }

 private:
  Point witness_;
  double discriminant_;
};

class PositivityViolation : public std::runtime_error {
 public:
  PositivityViolation(std::string symbol, Point witness, double value)
      : std::runtime_error(symbol + " = " + std::to_string(value) + " violates its lower bound at (t,x,xi) = (" +
                           std::to_string(witness.t) + ", " + std::to_string(witness.x) + ", " +
                           std::to_string(witness.xi) + ")"),
        symbol_(std::move(symbol)),
        witness_(witness),
        value_(value) {}
  const std::string& symbol() const noexcept { return symbol_; }
  Point witness() const noexcept { return witness_; }
  double value() const noexcept { return value_; }

 private:
  std::string symbol_;
  Point witness_;
  double value_;
};

class NonHyperbolic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time integrator detected norm growth beyond the guard threshold.
class InstabilityDetected : public std::runtime_error {
 public:
  InstabilityDetected(double t, double growth)
      : std::runtime_error("instability guard tripped at t = " + std::to_string(t)), t_(t), growth_(growth) {}
  double time() const noexcept { return t_; }
  double growth() const noexcept { return growth_; }

 private:
  double t_;
  double growth_;
};

/// A report, dump or plot could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace triplex
