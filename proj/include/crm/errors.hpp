#pragma once

#include <stdexcept>
#include <string>

namespace crm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weight or count outside the support of a distribution.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An integral (or normalizer) that is infinite or numerically suspected to be.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A model whose hyperparameters violate A0/A1/A2 or a properness condition.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Truncated tail mass exceeds the configured bound.
class TailBoundError : public Error {
 public:
  using Error::Error;
};

/// The declared endpoint behaviour of an integrand disagrees with the evaluator.
class SingularityMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidObservation : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A file that cannot be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class StatisticError : public Error {
 public:
  using Error::Error;
};

class RngFault : public Error {
 public:
  using Error::Error;
};

}  // namespace crm
