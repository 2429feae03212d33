#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pandora {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: probabilities that do not sum to one, negative costs, etc.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
  ValidationError(const std::string& what, std::vector<std::string> issues)
      : Error(what), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Argument outside the domain of a function (e.g. a value not in the support).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An exact enumeration or state space would exceed the configured bound.
class BoundExceeded : public Error {
 public:
  BoundExceeded(const std::string& what, double estimate, double bound)
      : Error(what), estimate_(estimate), bound_(bound) {}

  double estimate() const noexcept { return estimate_; }
  double bound() const noexcept { return bound_; }

 private:
  double estimate_;
  double bound_;
};

// The algorithm is not defined for this instance model (e.g. joint-form edges
// handed to an algorithm that needs per-endpoint values).
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

}  // namespace pandora
