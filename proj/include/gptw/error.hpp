#pragma once

#include <stdexcept>
#include <string>

namespace gptw {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// The field vanishes somewhere, so no global lifting exists.
class VortexPresent : public Error {
 public:
  using Error::Error;
};

/// Phase unwrapping depends on the path: there are unresolved vortices.
class InconsistentWinding : public Error {
 public:
  using Error::Error;
};

class NoSuchSolution : public Error {
 public:
  using Error::Error;
};

class SupportTooLarge : public Error {
 public:
  using Error::Error;
};

class WeightOutOfRange : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NotASaddle : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated GPTW field file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace gptw
