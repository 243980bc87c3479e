#pragma once

#include <stdexcept>
#include <string>

namespace nsaflow {

/// Shapes do not fit together (non-square, mismatched, empty, k too large).
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input has no usable direction (all-zero matrix where a norm is divided by).
class DegenerateInputError : public std::domain_error {
 public:
  explicit DegenerateInputError(const std::string& what) : std::domain_error(what) {}
};

/// Entries that are NaN or infinite where finite values are required.
class NonFiniteError : public std::domain_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::domain_error(what) {}
};

/// A configuration value outside its documented range.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// File could not be read, parsed or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nsaflow
