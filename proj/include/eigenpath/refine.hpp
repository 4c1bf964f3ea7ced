#pragma once

#include <cmath>
#include <limits>

#include "eigenpath/newton.hpp"

namespace eigenpath {

inline constexpr int kMaxRefineIterations = 64;

struct RefineResult {
  ApproxEigenpair pair;
  int iterations = 0;
};

namespace detail {

/// log2 log2 (4 / (epsilon |zeta|)), or -infinity when the inner logarithm is <= 0.
inline double refine_threshold(double epsilon, Complex zeta) {
  const double x = 4.0 / (epsilon * std::abs(zeta));
  if (!(x > 1.0)) return -std::numeric_limits<double>::infinity();
  return std::log2(std::log2(x));
}

}  // namespace detail

/// Newton steps on an approximate eigenpair of A (|A|_F = 1) until the relative error of
/// both eigenvalue and eigenvector is below epsilon.
inline RefineResult relative_error_refine(const ComplexMatrix& a, const ApproxEigenpair& p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ArgumentError("relative_error_refine: epsilon must lie in (0, 1/2)");
  require_square(a, "relative_error_refine");
  if (std::abs(a.norm() - 1.0) > 1e-10) throw ArgumentError("relative_error_refine: expected |A|_F = 1");
  const double nw = p.w.norm();
  if (!(nw > 0.0)) throw ArgumentError("relative_error_refine: zero vector");

  RefineResult out{{p.zeta, p.w / nw}, 0};
  do {
    if (out.iterations >= kMaxRefineIterations) {
      throw NumericalError(FailureKind::kNonconvergence,
                           "relative_error_refine: no stop after 64 iterations (eigenvalue near 0?)");
    }
    out.pair = newton_step(a, out.pair).first;
    ++out.iterations;
  } while (!(static_cast<double>(out.iterations) >= detail::refine_threshold(epsilon, out.pair.zeta)));
  return out;
}

}  // namespace eigenpath
