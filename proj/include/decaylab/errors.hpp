#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: violated precondition or malformed configuration.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input lies outside the domain where a formula is meaningful.
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// A numerical procedure failed to reach its target.
class NumericalError : public Error {
 public:
  NumericalError(std::string op, const std::string& what, double achieved = -1.0);

  const std::string& operation() const noexcept { return op_; }
  // Achieved error estimate, or a negative value when not meaningful.
  double achieved() const noexcept { return achieved_; }

 private:
  std::string op_;
  double achieved_;
};

}  // namespace decaylab
