#pragma once

#include <stdexcept>
#include <string>

namespace hdlda {

/// Argument outside the mathematical domain of an operation (alpha not in
/// (0,1), q not in (0,2), singular covariance where full rank is needed...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a structural precondition: mismatched dimensions, a
/// non-symmetric "PSD" matrix, malformed inputs.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Angle or offset geometry requested for a zero direction.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation only implemented for diagonal covariances.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Not enough observations of a class for the requested statistic.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hdlda
