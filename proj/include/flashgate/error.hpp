// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace flashgate {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, shape, finiteness).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A vector too close to zero to define a direction.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

/// Iterative kernel failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed trace line. The message carries the 1-based line and the field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed binary tensor (magic, version, dtype, truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions exceed the element guard.
class SizeError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace flashgate
