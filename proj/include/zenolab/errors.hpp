#pragma once

#include <stdexcept>
#include <string>

namespace zenolab {

// Base of everything the library throws on purpose. The CLI maps the three
// families below onto exit codes 2, 3 and 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: broken invariants, dimension mismatches, bad scenario files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The computation itself cannot proceed (truncation leak, singular likelihood).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularLikelihoodError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace zenolab
