#pragma once

#include <stdexcept>
#include <string>

namespace sspkit {

// Argument outside its mathematical domain (off-grid type, x or t outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A requested construction cannot satisfy its feasibility or rule constraints.
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature did not converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called on an input that violates its documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The deviation-loss identity was requested for a mechanism whose payments do
// not satisfy the envelope formula.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The delta search of the strictifier ran below its floor without meeting epsilon.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed mechanism or weights file. `where` names the offending field.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where), detail_(what) {}

  const std::string& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

}  // namespace sspkit
