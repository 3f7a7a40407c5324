#pragma once

#include <stdexcept>
#include <string>

namespace gqn {

// Dimension mismatch between matrices/vectors.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration value or inconsistent option combination.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value produced or consumed violated a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external data (dump lines, config files). Carries a line number
// when one is known; line() == 0 means "not line-addressable".
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Not enough data to satisfy a request (e.g. sampling more than stored).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API used out of order (step after done, backward without forward).
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value where a finite one is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint file problems, split by kind so callers can react differently.
class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { Io, Version, Truncated, Shape };

  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace gqn
