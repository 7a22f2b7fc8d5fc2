#pragma once

#include <stdexcept>
#include <string>

namespace signseg {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad domain data: shape mismatches, invalid tag codes, overlapping
// segments, inconsistent labels.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad configuration (unknown keys, out-of-range values, infeasible
// synthesis ranges). A subclass of ValidationError so both map to the
// same exit code.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// File-level problems: missing files, bad magic, truncated payloads.
class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when a CTC target admits no alignment for the given number of
// frames. Callers typically catch this and drop the CTC term.
class CtcInfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace signseg
