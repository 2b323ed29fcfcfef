#pragma once

#include <stdexcept>

namespace zfaging {

/// Bad configuration or out-of-contract argument. The CLI maps it to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a special function or density.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for numeric failures. The CLI maps these to exit code 1.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionLoss : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class NonConvergence : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class DegenerateSpectrum : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class PreconditionViolation : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class UnachievableTarget : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Raised when a large-antenna limit does not exist (no pilot contamination).
class UnboundedLimit : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class SingularGram : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace zfaging
