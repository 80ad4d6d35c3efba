#pragma once

#include <stdexcept>
#include <string>

namespace ucake {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ratio with both entitlements zero was constructed.
class DegenerateRatioError : public Error {
 public:
  using Error::Error;
};

/// An operator produced (0,0) from degenerate arguments.
class DegenerateProductError : public Error {
 public:
  using Error::Error;
};

class InvalidCutoffError : public Error {
 public:
  using Error::Error;
};

/// No operator and child orientation reproduces the requested parent.
class NotADecompositionError : public Error {
 public:
  using Error::Error;
};

class InfeasibleCutError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ucake
