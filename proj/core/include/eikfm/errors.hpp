#pragma once

#include <stdexcept>
#include <string>

namespace eikfm {

/// Raised when inputs violate a documented precondition (non-positive
/// slowness, off-grid source, mismatched grids, malformed files).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an internal invariant breaks. Reaching one is a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace eikfm
