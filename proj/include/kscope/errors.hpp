#pragma once

#include <stdexcept>
#include <string>

namespace kscope {

// Exit-code class of an error. Validation problems are the caller's fault;
// capacity/precision problems mean the request exceeds what we can compute.
enum class ErrorClass { validation = 1, capacity = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

// Argument outside the mathematical domain (s in a forbidden region, p not prime, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorClass::validation, what) {}
};

// Table too short, N above the configured cap, overflow of 64-bit values.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

// Ran off the end of an enumerable resource (e.g. no N-th prime inside the sieve).
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

// Requested accuracy unreachable inside the documented working range.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

// Operation requires a verdict the data did not give (e.g. a non-saturated kernel).
class VerdictError : public Error {
 public:
  explicit VerdictError(const std::string& what) : Error(ErrorClass::validation, what) {}
};

// Internal consistency check failed; indicates a bug, not bad input.
class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

// Eigensolver failure or similar numerical breakdown.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

// Argument-principle contour passes too close to a zero.
class ContourError : public Error {
 public:
  explicit ContourError(const std::string& what) : Error(ErrorClass::capacity, what) {}
};

}  // namespace kscope
