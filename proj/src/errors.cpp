#include "decaylab/errors.hpp"

#include <cstdio>

namespace decaylab {

namespace {

std::string compose(const std::string& op, const std::string& what, double achieved) {
  std::string msg = op + ": " + what;
  if (achieved >= 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (achieved error estimate %.3e)", achieved);
    msg += buf;
  }
  return msg;
}

}  // namespace

NumericalError::NumericalError(std::string op, const std::string& what, double achieved)
    : Error(compose(op, what, achieved)), op_(std::move(op)), achieved_(achieved) {}

}  // namespace decaylab
