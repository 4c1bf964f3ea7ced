#pragma once

// Newton's method for the eigenpair problem F_A(lambda, v) = (A - lambda Id) v, with the
// correction restricted to C x w-perp.

#include <cmath>
#include <optional>
#include <utility>

#include "eigenpath/conditioning.hpp"
#include "eigenpath/core_linalg.hpp"

namespace eigenpath {

/// Candidate (zeta, w) for a given matrix, with |w| = 1.
struct ApproxEigenpair {
  Complex zeta;
  ComplexVector w;
};

struct NewtonStep {
  Complex lambda_dot;
  ComplexVector v_dot;  // in w-perp
  double beta = 0.0;    // sqrt(|lambda_dot|^2 + |v_dot|^2)
};

/// DF_A(zeta, w) restricted to C x w-perp, factored once in the frame U_w. In those
/// coordinates the restriction is [[-1, a^*], [0, block]] with block = A_hat - zeta Id.
class LocalLinearization {
 public:
  LocalLinearization(const ComplexMatrix& a, const ApproxEigenpair& p)
      : reduced_(reduced_operator(a, p.zeta, p.w)), zeta_(p.zeta) {
    lu_.compute(reduced_.block);
    if (!(lu_.rcond() > kRankCutoff) || !all_finite(reduced_.block)) {
      throw NumericalError(FailureKind::kNewtonUndefined, "newton: singular reduced operator");
    }
  }

  const ReducedOperator& reduced() const { return reduced_; }
  Eigen::Index dim() const { return reduced_.block.rows() + 1; }

  NewtonStep step() const {
    const ComplexVector y = lu_.solve(reduced_.left);
    NewtonStep out;
    out.lambda_dot = zeta_ - reduced_.corner + (reduced_.top * y)(0);
    ComplexVector padded = ComplexVector::Zero(dim());
    padded.tail(dim() - 1) = y;
    out.v_dot = reduced_.basis.apply(padded);
    out.beta = std::sqrt(std::norm(out.lambda_dot) + y.squaredNorm());
    return out;
  }

  /// The Newton image N_A(zeta, w), with w renormalized.
  ApproxEigenpair next(const NewtonStep& s) const {
    ComplexVector w = reduced_.basis.apply(unit_vector(dim(), 0)) - s.v_dot;
    const double nw = w.norm();
    if (!(nw > 0.0) || !std::isfinite(nw)) {
      throw NumericalError(FailureKind::kNewtonUndefined, "newton: degenerate update");
    }
    return {zeta_ - s.lambda_dot, w / nw};
  }

  /// |(DF|_{C x w-perp})^{-1} A_dot w| for a direction A_dot.
  double phi(const ComplexMatrix& a_dot) const {
    const ComplexVector c = reduced_.basis.apply_adjoint(a_dot * reduced_.basis.apply(unit_vector(dim(), 0)));
    const ComplexVector z = lu_.solve(c.tail(dim() - 1));
    const Complex zeta_dot = (reduced_.top * z)(0) - c(0);
    return std::sqrt(std::norm(zeta_dot) + z.squaredNorm());
  }

  /// mu(A, zeta, w), cached.
  double mu() const {
    if (!mu_) mu_ = eigenpath::mu(reduced_);
    return *mu_;
  }

  /// The n x n matrix of DF|_{C x w-perp} in frame coordinates.
  ComplexMatrix frame_system() const {
    const Eigen::Index n = dim();
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(0, 0) = -1.0;
    m.row(0).tail(n - 1) = reduced_.top;
    m.bottomRightCorner(n - 1, n - 1) = reduced_.block;
    return m;
  }

 private:
  ReducedOperator reduced_;
  Complex zeta_;
  Eigen::PartialPivLU<ComplexMatrix> lu_;
  mutable std::optional<double> mu_;
};

inline std::pair<ApproxEigenpair, NewtonStep> newton_step(const ComplexMatrix& a, const ApproxEigenpair& p) {
  const LocalLinearization lin(a, p);
  NewtonStep s = lin.step();
  ApproxEigenpair next = lin.next(s);
  return {std::move(next), std::move(s)};
}

inline ApproxEigenpair newton_iterate(const ComplexMatrix& a, ApproxEigenpair p, int k) {
  if (k < 0) throw ArgumentError("newton_iterate: negative iteration count");
  for (int i = 0; i < k; ++i) p = newton_step(a, p).first;
  return p;
}

/// Length of the Newton step; callers normalize |A|_F = 1.
inline double beta(const ComplexMatrix& a, const ApproxEigenpair& p) {
  return LocalLinearization(a, p).step().beta;
}

inline constexpr double kCertifyConstant = 0.2;

/// Radius c_0/mu of the dist_A-ball of approximate eigenpairs around a well-posed pair.
inline double certify_radius(double mu_value) {
  if (!(mu_value >= (1.0 - 1e-12) / std::sqrt(2.0))) {
    throw ArgumentError("certify_radius: mu must be at least 1/sqrt(2)");
  }
  return kCertifyConstant / mu_value;
}

}  // namespace eigenpath
