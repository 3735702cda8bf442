#pragma once

#include <stdexcept>
#include <string>

namespace nyk {

// Bad caller input: dimensions, duplicate indices, malformed files.  CLI maps this to exit 2.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown discovered mid-computation (collapsed active set, degenerate margin,
// non-psd kernel fed to the MEB solver).  CLI maps this to exit 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nyk
