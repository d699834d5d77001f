#pragma once

#include <stdexcept>
#include <string>

namespace qdot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// numerics
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A semi-infinite integral whose integrand decays too slowly to converge.
class DivergentTail : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// leads and kernels
class ZeroTemperature : public Error {
 public:
  using Error::Error;
};

class DeltaKernel : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// dot model
/// The occupation is a pure step function and has no pointwise density.
class PureStep : public Error {
 public:
  using Error::Error;
};

class InvalidSystem : public Error {
 public:
  using Error::Error;
};

// erasure
class DivergentInput : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluation routes disagree beyond their tolerance.
class RouteMismatch : public Error {
 public:
  using Error::Error;
};

// mad oracle
class StepMismatch : public Error {
 public:
  using Error::Error;
};

class AsymmetricInput : public Error {
 public:
  using Error::Error;
};

// dynamics
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

// cli
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string field)
      : Error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace qdot
