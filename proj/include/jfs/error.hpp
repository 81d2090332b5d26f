#pragma once

#include <stdexcept>
#include <string>

namespace jfs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation needs Y(t) to be invertible and it is not.
class SingularTimeError : public Error {
 public:
  SingularTimeError(double t, const std::string& what)
      : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Raised when a curvature field is evaluated outside its interval.
class FieldDomainError : public Error {
 public:
  FieldDomainError(double t, const std::string& what)
      : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace jfs
