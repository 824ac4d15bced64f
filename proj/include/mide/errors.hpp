#pragma once

#include <stdexcept>
#include <string>

namespace mide {

// Malformed input files (CSV, config syntax).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that parse but are inconsistent: dimension mismatches, bad weights,
// unknown model names, out-of-domain parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mide
