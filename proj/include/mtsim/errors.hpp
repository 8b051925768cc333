#pragma once

#include <stdexcept>
#include <string>

namespace mtsim {

/// Bad caller input: parameters out of range, malformed configs, NaN data.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (e.g. a
/// probability outside (0,1) passed to a quantile).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mtsim
