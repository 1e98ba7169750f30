#pragma once

#include <stdexcept>
#include <string>

namespace anistat {

// Every library failure derives from Error so callers can catch once and map
// the category to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite arguments, unknown configuration keys.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Mathematical domain violations (x <= 0 for K_nu, nu <= 1 at lag 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data that cannot support an estimate, e.g. a constant field.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// Sample size too small for the requested confidence level (N <= 2 l_p).
class InfeasibleSampleSize : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace anistat
