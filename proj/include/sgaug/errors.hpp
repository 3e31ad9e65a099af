#pragma once

#include <stdexcept>
#include <string>

namespace sgaug {

// Precondition or invariant violation on caller-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed on-disk input. The message carries file/line/field context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A perturbation strategy has no legal replacement (e.g. a single-class vocabulary).
class CannotPerturb : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The plausibility scoring service failed after all retries.
class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgaug
