#pragma once

#include <stdexcept>
#include <string>

namespace rpromp {

// Geodesic is not unique (antipodal points on a sphere factor).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A linear solve or factorization failed (singular or indefinite matrix).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative procedure hit its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpromp
