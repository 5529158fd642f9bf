#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace matdens {

/// Inputs violate an operation's shape preconditions (h > n, part-length mismatch, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numeric input outside an operation's domain: negative mass, non-monotone
/// boundary, perturbation that does not keep a measure feasible.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration would exceed its configured candidate budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double estimated_cost)
      : std::runtime_error(what), estimated_cost_(estimated_cost) {}
  double estimated_cost() const { return estimated_cost_; }

 private:
  double estimated_cost_;
};

/// Malformed text input (matrix files, SDPA files, certificates, solutions).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { kMissingBinary, kNonzeroExit, kUnparseableOutput };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A certificate failed an exact check (nonpositive diagonal, shape mismatch).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace matdens
