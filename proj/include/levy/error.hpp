#pragma once

#include <stdexcept>
#include <string>

namespace levy {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Point outside the domain of the potential.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Model has no structure the requested operation relies on.
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Raised when a trajectory keeps rejecting proposals.
class StuckStateError : public Error {
 public:
  StuckStateError(const std::string& what, std::size_t trajectory, double time)
      : Error(what), trajectory_(trajectory), time_(time) {}
  std::size_t trajectory() const { return trajectory_; }
  double time() const { return time_; }

 private:
  std::size_t trajectory_;
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void fail_parameter(const std::string& message);

}  // namespace levy
