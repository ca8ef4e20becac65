#pragma once

#include <stdexcept>
#include <string>

namespace lfmo {

// Invalid input: bad parameters, malformed specs, inconsistent dimensions.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A computed probability or rate left its admissible range by more than
// roundoff allows. The CLI maps this to exit code 2.
class NumericInstabilityError : public std::runtime_error {
 public:
  explicit NumericInstabilityError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace lfmo
