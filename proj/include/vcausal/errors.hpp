#pragma once

#include <stdexcept>
#include <string>

namespace vcausal {

// Argument outside the admissible domain of a physical formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Event handed to a transform expecting the other frame.
class FrameMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

// Velocity composition evaluated at (or numerically at) its pole 1 - v*u = 0.
class CompositionSingularity : public DomainError {
 public:
  using DomainError::DomainError;
};

// Influence model incompatible with the requested source.
class ModelSourceConflict : public DomainError {
 public:
  using DomainError::DomainError;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vcausal
