#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain an evaluator is defined on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The warped metric degenerates (rho <= 0) somewhere it was evaluated.
class DegenerateMetricError : public Error {
public:
  using Error::Error;
};

/// Invalid parameters handed to a constructor or factory.
class ConstructionError : public Error {
public:
  using Error::Error;
};

class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// Cross-section spectrum violating the sign convention (lambda_1 must be < 0).
class InvalidSpectrumError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Linear solver or eigen-solver failure.
class SolverError : public Error {
public:
  using Error::Error;
};

} // namespace conelab
