#pragma once

#include <stdexcept>
#include <string>

namespace lacunary {

/// Malformed input or a violated precondition on an argument.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text that could not be parsed (point specs, config files).
class ParseError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// The request is well-formed but lies outside the regime in which an
/// operation is valid (divergent point, asymptotic formula out of range).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace lacunary
