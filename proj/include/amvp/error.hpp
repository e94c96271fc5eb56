#pragma once

#include <stdexcept>
#include <string>

namespace amvp {

/// Inputs violate a structural contract (dimension mismatch, misaligned arrays).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric argument lies outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Horizontal gradient vanishes where a nonzero one is required.
class DegenerateGradientError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The ball radius does not resolve the grid spacing.
class UnderResolvedBallError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The group model does not carry the requested structure (e.g. step >= 3 arithmetic).
class UnsupportedModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Rejection sampling cannot produce a usable cloud.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amvp
