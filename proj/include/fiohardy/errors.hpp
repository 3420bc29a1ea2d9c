#pragma once

#include <stdexcept>
#include <string>

namespace fiohardy {

// Base class for all library failures that carry a diagnosable cause.
class FioError : public std::runtime_error {
 public:
  explicit FioError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed container or inconsistent dimensions/sizes.
class StructuralError : public FioError {
 public:
  explicit StructuralError(const std::string& what) : FioError(what) {}
};

// Non-finite intermediate value, with the offending location in the message.
class NumericError : public FioError {
 public:
  explicit NumericError(const std::string& what) : FioError(what) {}
};

// Caller-supplied parameters outside the supported range.
class ConfigError : public FioError {
 public:
  explicit ConfigError(const std::string& what) : FioError(what) {}
};

// The requested quantity is not representable on the current grid.
class ResolutionError : public FioError {
 public:
  explicit ResolutionError(const std::string& what) : FioError(what) {}
};

// Input outside the mathematical domain of the operation (e.g. frequency 0).
class DomainError : public FioError {
 public:
  explicit DomainError(const std::string& what) : FioError(what) {}
};

// A nonlinear solve failed to converge.
class SingularityError : public FioError {
 public:
  explicit SingularityError(const std::string& what) : FioError(what) {}
};

// A sampling predicate rejected every candidate.
class EmptySampleError : public FioError {
 public:
  explicit EmptySampleError(const std::string& what) : FioError(what) {}
};

}  // namespace fiohardy
