#pragma once

#include <stdexcept>
#include <string>

namespace ergm {

/// Malformed arguments: dimension mismatch, bad index, out-of-range values.
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string &what) : std::invalid_argument(what) {}
};

/// A request that would exceed a hard enumeration/size cap.
class ResourceLimit : public std::runtime_error {
public:
  explicit ResourceLimit(const std::string &what) : std::runtime_error(what) {}
};

/// The likelihood has no finite maximizer for this data (empty/complete graph).
class SeparationError : public std::runtime_error {
public:
  explicit SeparationError(const std::string &what) : std::runtime_error(what) {}
};

/// Raised only where a caller asked for non-convergence to be fatal.
class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string &what) : std::runtime_error(what) {}
};

} // namespace ergm
