#pragma once

#include <stdexcept>
#include <string>

namespace bnslq {

// Malformed input text (CSV rows, bit strings, JSON documents).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request outside what this toolkit builds (e.g. m >= 3 assembly).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant. Seeing one of these is a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Caller passed arguments outside an operation's precondition.
using ArgumentError = std::invalid_argument;

}  // namespace bnslq
