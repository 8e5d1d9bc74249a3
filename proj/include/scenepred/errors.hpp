#pragma once

#include <stdexcept>
#include <string>

namespace scenepred {

// Domain preconditions (bad fov, non-positive depth, shape mismatch...) are
// reported with std::invalid_argument. The classes below carry the failure
// categories the command-line tool maps onto exit codes.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A provider produced rasters or object states that break the documented
/// invariants (simplex segmentation, positive depth, bounded locations).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scenepred
