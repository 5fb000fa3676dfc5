#pragma once

#include <stdexcept>
#include <string>

namespace ietidp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSmoothnessError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the parameter domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class GeneratorError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A local matrix that should be SPD failed to factorize.
class CoercivityError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

/// Raised when an operator violates a structural property the solver relies
/// on (coarse matrix not SPD, negative curvature in PCG, ...).
class OperatorError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ietidp
