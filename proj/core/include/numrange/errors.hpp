#pragma once

#include <stdexcept>
#include <string>

namespace numrange {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid user input (bad JSON, non-square matrix, non-unit vector, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A target point lies outside the numerical range.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A requested quantity is undefined at this point, e.g. curvature inside a
// corner's normal cone or the dual of a degenerate range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A check that holds in exact arithmetic failed numerically.
class ToleranceBreakdown : public Error {
 public:
  using Error::Error;
};

}  // namespace numrange
