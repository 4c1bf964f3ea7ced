#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eigenpath {

/// Raised for malformed arguments: shape mismatches, zero vectors, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FailureKind {
  kDegenerateArc,     // endpoints are real-linearly dependent
  kIllPosed,          // reduced operator singular (point in Sigma')
  kNewtonUndefined,   // Newton map not defined at the current point
  kPathFailure,       // continuation lost its certificate
  kSigmaCrossing,     // oracle continuation hit a multiple eigenvalue
  kOracleFailure,     // reference eigensolver did not converge
  kNonconvergence,    // relative-error refinement did not stop
  kBudgetExceeded,    // step / proposal cap exhausted
};

inline std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kDegenerateArc: return "degenerate_arc";
    case FailureKind::kIllPosed: return "ill_posed";
    case FailureKind::kNewtonUndefined: return "newton_undefined";
    case FailureKind::kPathFailure: return "path_failure";
    case FailureKind::kSigmaCrossing: return "sigma_crossing";
    case FailureKind::kOracleFailure: return "oracle_failure";
    case FailureKind::kNonconvergence: return "nonconvergence";
    case FailureKind::kBudgetExceeded: return "budget_exceeded";
  }
  return "unknown";
}

/// Numerical failure carrying a machine-readable kind.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(FailureKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  FailureKind kind() const noexcept { return kind_; }

 private:
  FailureKind kind_;
};

/// Budget exhaustion is reported distinctly from ill-posedness.
class BudgetExceeded : public NumericalError {
 public:
  explicit BudgetExceeded(const std::string& what)
      : NumericalError(FailureKind::kBudgetExceeded, what) {}
};

}  // namespace eigenpath
