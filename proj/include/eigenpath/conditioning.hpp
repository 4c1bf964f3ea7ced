#pragma once

// The reduced operator A_{lambda,v}, the eigenpair condition number mu and its
// variants, and the left eigenvector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "eigenpath/core_linalg.hpp"
#include "eigenpath/geometry.hpp"
#include "eigenpath/oracle.hpp"

namespace eigenpath {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A written in the frame U_v, split as [[corner, top], [left, *]], together with the
/// compression of A - lambda Id to v-perp.
struct ReducedOperator {
  HouseholderFrame basis;
  ComplexMatrix block;       // (n-1) x (n-1): J^* U_v^* (A - lambda Id) U_v J
  Complex corner;            // e_1^* U_v^* A U_v e_1
  Eigen::RowVectorXcd top;   // first row, columns 2..n
  ComplexVector left;        // first column, rows 2..n
  double matrix_norm = 0.0;  // |A|_F
};

inline ReducedOperator reduced_operator(const ComplexMatrix& a, Complex lambda, const ComplexVector& v) {
  require_square(a, "reduced_operator");
  if (a.rows() < 2) throw ArgumentError("reduced_operator: need n >= 2");
  if (v.size() != a.rows()) throw ArgumentError("reduced_operator: dimension mismatch");
  HouseholderFrame frame(v);
  const ComplexMatrix c = frame.conjugate(a);
  const Eigen::Index m = a.rows() - 1;
  ReducedOperator out{std::move(frame), c.bottomRightCorner(m, m), c(0, 0),
                      c.row(0).tail(m), c.col(0).tail(m), a.norm()};
  out.block.diagonal().array() -= lambda;
  return out;
}

namespace detail {

/// Singular values of the block, or an empty vector when it is numerically singular.
/// The cutoff is relative to max(sigma_1, |A|_F) so that a vanishing block counts as
/// singular regardless of its own scale.
inline RealVector block_singular_values(const ReducedOperator& r) {
  // Eigenvalues of the Gram matrix are several times cheaper than a Jacobi SVD and
  // accurate to ~eps (sigma_1/sigma_min)^2 relative; fall back when that is too coarse.
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> gram(r.block.adjoint() * r.block,
                                                           Eigen::EigenvaluesOnly);
  const RealVector ev = gram.eigenvalues();  // ascending
  RealVector s;
  if (gram.info() == Eigen::Success && ev(ev.size() - 1) > 0.0 && ev(0) >= 1e-8 * ev(ev.size() - 1)) {
    s = ev.reverse().cwiseSqrt();
  } else {
    s = singular_values(r.block);
  }
  const double scale = std::max(s(0), r.matrix_norm);
  if (!(s(s.size() - 1) > kRankCutoff * scale)) return RealVector();
  return s;
}

}  // namespace detail

/// |A|_F |A_{lambda,v}^{-1}|; +infinity when the reduced block is singular.
inline double mu(const ReducedOperator& r) {
  if (!(r.matrix_norm > 0.0)) throw ArgumentError("mu: zero matrix");
  const RealVector s = detail::block_singular_values(r);
  if (s.size() == 0) return kInfinity;
  return r.matrix_norm / s(s.size() - 1);
}

inline double mu(const ComplexMatrix& a, Complex lambda, const ComplexVector& v) {
  return mu(reduced_operator(a, lambda, v));
}

/// |A|_F |A_{lambda,v}^{-1}|_F
inline double mu_frobenius(const ComplexMatrix& a, Complex lambda, const ComplexVector& v) {
  const ReducedOperator r = reduced_operator(a, lambda, v);
  if (!(r.matrix_norm > 0.0)) throw ArgumentError("mu_frobenius: zero matrix");
  const RealVector s = detail::block_singular_values(r);
  if (s.size() == 0) return kInfinity;
  return r.matrix_norm * std::sqrt(s.cwiseInverse().squaredNorm());
}

namespace detail {

template <typename F>
std::vector<double> per_eigenpair(const ComplexMatrix& a, F&& f) {
  const oracle::ReferenceSpectrum spectrum = oracle::reference_eigenpairs(a);
  std::vector<double> out;
  for (const auto& p : spectrum.pairs) {
    out.push_back(spectrum.near_sigma ? kInfinity : f(a, p.eigenvalue, p.eigenvector));
  }
  return out;
}

inline double root_mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

}  // namespace detail

/// max_j mu(A, lambda_j, v_j) over the oracle eigenpairs; +infinity when A is Sigma-near.
inline double mu_max(const ComplexMatrix& a) {
  const auto m = detail::per_eigenpair(a, [](const auto& x, Complex l, const auto& v) { return mu(x, l, v); });
  return *std::max_element(m.begin(), m.end());
}

/// (1/n sum_j mu^2(A, lambda_j, v_j))^{1/2}
inline double mu_av(const ComplexMatrix& a) {
  return detail::root_mean_square(
      detail::per_eigenpair(a, [](const auto& x, Complex l, const auto& v) { return mu(x, l, v); }));
}

/// (1/n sum_j mu_F^2(A, lambda_j, v_j))^{1/2}
inline double mu_F_av(const ComplexMatrix& a) {
  return detail::root_mean_square(detail::per_eigenpair(
      a, [](const auto& x, Complex l, const auto& v) { return mu_frobenius(x, l, v); }));
}

/// Left eigenvector u with (A - lambda Id)^* u = 0, normalized so that <u, v> = |v|^2.
inline ComplexVector left_eigenvector(const ComplexMatrix& a, Complex lambda, const ComplexVector& v) {
  const ReducedOperator r = reduced_operator(a, lambda, v);
  if (detail::block_singular_values(r).size() == 0) {
    throw NumericalError(FailureKind::kIllPosed, "left_eigenvector: singular reduced operator");
  }
  // In the frame, u' = (1, -z) with (block)^* z = top^*.
  const ComplexVector z = r.block.adjoint().partialPivLu().solve(r.top.adjoint());
  ComplexVector u_frame(a.rows());
  u_frame(0) = 1.0;
  u_frame.tail(a.rows() - 1) = -z;
  return v.norm() * r.basis.apply(u_frame);
}

/// |u| |v| / |<u, v>|
inline double mu_lambda(const ComplexMatrix& a, Complex lambda, const ComplexVector& v) {
  return left_eigenvector(a, lambda, v).norm() / v.norm();
}

/// Velocity of the lifted path through (B, lambda, v) in V when B moves with speed B_dot.
struct LiftedVelocity {
  double mu = 0.0;
  Complex lambda_dot;
  double v_dot_norm = 0.0;   // |v_dot| / |v|, v_dot taken in v-perp
  double speed = 0.0;        // |(B_dot, lambda_dot, v_dot)|

  /// Integrand of the condition length.
  double condition_speed() const { return mu * speed; }
};

inline LiftedVelocity lifted_velocity(const ComplexMatrix& b, const ComplexMatrix& b_dot,
                                      Complex lambda, const ComplexVector& v) {
  const ReducedOperator r = reduced_operator(b, lambda, v);
  LiftedVelocity out;
  out.mu = mu(r);
  if (!std::isfinite(out.mu)) {
    throw NumericalError(FailureKind::kIllPosed, "lifted_velocity: singular reduced operator");
  }
  const ComplexMatrix c = r.basis.conjugate(b_dot);
  const Eigen::Index m = b.rows() - 1;
  const ComplexVector y = -r.block.partialPivLu().solve(c.col(0).tail(m));
  out.lambda_dot = c(0, 0) + (r.top * y)(0);
  out.v_dot_norm = y.norm();
  out.speed = std::sqrt(b_dot.squaredNorm() + std::norm(out.lambda_dot) + y.squaredNorm());
  return out;
}

}  // namespace eigenpath
