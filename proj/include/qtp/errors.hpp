#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qtp {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Zero matrix, zero vector, or a measurement with no weight anywhere.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Raised when a resource cannot support perfect teleportation. Carries the
// Schmidt spectrum that led to the verdict.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, std::vector<double> lambdas)
      : Error(what), lambdas_(std::move(lambdas)) {}

  const std::vector<double>& lambdas() const noexcept { return lambdas_; }

 private:
  std::vector<double> lambdas_;
};

// Classical channel errors.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public Error {
 public:
  using Error::Error;
};

class IncompleteFrameError : public Error {
 public:
  using Error::Error;
};

class SessionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtp
