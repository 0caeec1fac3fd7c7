#pragma once

#include <stdexcept>
#include <string>

namespace tmu {

// Base of every error the engine raises. The CLI maps the concrete type to
// an exit code, so new error kinds should derive from one of the classes
// below rather than from Error directly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments to an API: out-of-range slot, mismatched jet layouts,
// derivative past the stored order, unknown catalog name.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Model configuration problems (missing or invalid parameters, schema
// violations in model files, unbound symbols).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A smooth expression hit a point where it is not defined: division by a
// zero-valued jet, sqrt/ln of a non-positive value, null fiber vector, ...
class SingularEvaluation : public Error {
 public:
  SingularEvaluation(const std::string& what, double offending)
      : Error(what), offending_(offending) {}
  explicit SingularEvaluation(const std::string& what) : Error(what) {}
  double offending_value() const { return offending_; }

 private:
  double offending_ = 0.0;
};

// Evaluation outside the model's chart guard.
class ChartViolation : public SingularEvaluation {
 public:
  using SingularEvaluation::SingularEvaluation;
};

}  // namespace tmu
