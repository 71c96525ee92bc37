#pragma once

#include <stdexcept>
#include <string>

namespace crpa {

/// Bad input to a public operation (non-positive sizes, malformed scenario).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to deliver its contract (quadrature did not
/// converge, objective became non-finite).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crpa
