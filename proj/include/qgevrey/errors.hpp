#pragma once

#include <stdexcept>
#include <string>

namespace qgevrey {

// Bad parameters handed to a constructor or operation (exit code 2 at the CLI).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point lies outside the region where an operation is defined or certified
// (zero spiral of theta, truncation annulus, shrinking disc D(0, r_N), ...).
class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical bound that was supposed to hold on a sample set does not.
class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qgevrey
