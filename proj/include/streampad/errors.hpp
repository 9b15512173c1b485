#pragma once

#include <stdexcept>
#include <string>

namespace streampad {

/// Raised for malformed input text (bad CSV line, bad grid file key).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when otherwise well-formed data violates a domain invariant,
/// e.g. a timestamp regression inside a case.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for invalid configuration (out-of-range threshold, unknown kind).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when two datasets that must join one-to-one fail to line up,
/// e.g. a verdict without a matching ground-truth event.
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace streampad
