#pragma once

#include <stdexcept>
#include <string>

namespace qdyn {

/// Input outside the domain of an operation (undefined site, negative radicand, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A product or orbit left the floating-point range; use the log-scaled variant.
class ScaleOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Memory cap, expansion-order cap or simulation budget exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite lattice window too small for the requested accuracy.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Band search could not resolve the expected structure (missed band, closed gap).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Band with neither or both type-A/type-B containments.
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdyn
