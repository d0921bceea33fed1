#pragma once

#include <stdexcept>

namespace gprop {

/// Malformed or inconsistent user-supplied data (files, CSV rows, shape
/// mismatches between artifacts produced by different commands).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: factorization failure at the jitter cap, a
/// non-finite objective with no usable restart, and the like.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gprop
