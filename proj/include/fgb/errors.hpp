#pragma once

#include <stdexcept>
#include <string>

namespace fgb {

// Bad constructor / generator parameter. The message names the field.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed covering LP or dimension mismatch.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A primal/dual pair that does not certify anything.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Learner state queried before it is defined (e.g. an unobserved arm).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A documented precondition on an instance does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A mean or index falls outside its admissible range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid experiment configuration. The message names the field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fgb
