#pragma once

#include <stdexcept>
#include <string>

namespace secidx {

// Bad arguments or malformed input. The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Syntax or referential error in a file; the message carries the location.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// An integer quantity would not fit in 64 bits.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Ill-conditioned or singular linear algebra.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A self-check failed: the result contradicts an invariant that must hold
// by construction. Signals a bug, never bad input. CLI exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace secidx
