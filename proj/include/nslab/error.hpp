#pragma once

#include <stdexcept>
#include <string>

namespace nslab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: bad grid size, negative time, mismatched grids, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A resolution, containment, aliasing or measurement-window guard tripped.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive procedure did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  /// Best error estimate (or residual) reached before giving up.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace nslab
