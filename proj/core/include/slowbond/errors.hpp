#pragma once

#include <stdexcept>
#include <string>

namespace slowbond {

// Error taxonomy shared by every module. Callers that only care about
// "something went wrong" can catch std::runtime_error / std::logic_error.

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a run would exceed a memory or event budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An experiment specification violates a hypothesis of the scaling limit it targets.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Two independent computations of the same quantity disagree; this is an
/// implementation bug, not bad input.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace slowbond
