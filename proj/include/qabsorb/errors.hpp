#pragma once

#include <stdexcept>
#include <string>

namespace qabsorb {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Source with (numerically) zero varentropy where a deformation or
// skewness correction needs V > 0.
class DegenerateSourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration or allocation would exceed a fixed computational cap.
class CapExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

}  // namespace qabsorb
