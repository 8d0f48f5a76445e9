#pragma once

#include <stdexcept>
#include <string>

namespace tollnet {

// Density or argument outside the domain of a flow function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A specification or configuration violates one of its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver breakdown or an internal-consistency check failed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tollnet
