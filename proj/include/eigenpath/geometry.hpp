#pragma once

// Projective and product-space metrics, and arc-length parametrized great circles on
// the unit sphere of C^{n x n}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "eigenpath/core_linalg.hpp"

namespace eigenpath {

/// Fubini-Study distance between the classes of v and w, in [0, pi/2].
inline double proj_distance(const ComplexVector& v, const ComplexVector& w) {
  if (v.size() != w.size()) throw ArgumentError("proj_distance: dimension mismatch");
  const double nv = v.norm();
  const double nw = w.norm();
  if (!(nv > 0.0) || !(nw > 0.0)) throw ArgumentError("proj_distance: zero representative");
  // atan2 of the orthogonal and parallel parts keeps full precision near 0 and pi/2.
  const ComplexVector vn = v / nv;
  const ComplexVector wn = w / nw;
  const Complex c = vn.dot(wn);
  return std::atan2((wn - c * vn).norm(), std::abs(c));
}

/// A point (A, lambda, v) of C^{n x n} x C x P(C^n); on the solution variety when the
/// residual vanishes.
struct EigenTriple {
  ComplexMatrix matrix;
  Complex eigenvalue;
  ComplexVector eigenvector;

  /// |(A - lambda Id) v| / |v|
  double residual() const {
    return (matrix * eigenvector - eigenvalue * eigenvector).norm() / eigenvector.norm();
  }
};

inline double triple_distance(const EigenTriple& p, const EigenTriple& q) {
  const double dm = (p.matrix - q.matrix).norm();
  const double dl = std::abs(p.eigenvalue - q.eigenvalue);
  const double dv = proj_distance(p.eigenvector, q.eigenvector);
  return std::sqrt(dm * dm + dl * dl + dv * dv);
}

/// dist_A((lambda, v), (lambda', v')) = sqrt(|lambda - lambda'|^2/|A|_F^2 + d_P(v, v')^2).
inline double dist_a(const ComplexMatrix& a, Complex lambda, const ComplexVector& v,
                     Complex lambda2, const ComplexVector& v2) {
  const double na = a.norm();
  if (!(na > 0.0)) throw ArgumentError("dist_a: zero matrix");
  const double dl = std::abs(lambda - lambda2) / na;
  const double dv = proj_distance(v, v2);
  return std::sqrt(dl * dl + dv * dv);
}

/// Portion of the great circle of the real unit sphere S joining start to the normalized
/// endpoint, parametrized by arc length s in [0, alpha].
class GreatCircleArc {
 public:
  GreatCircleArc(ComplexMatrix start, ComplexMatrix direction, double alpha)
      : start_(std::move(start)), direction_(std::move(direction)), alpha_(alpha) {}

  const ComplexMatrix& start() const { return start_; }
  const ComplexMatrix& direction() const { return direction_; }
  double alpha() const { return alpha_; }

  ComplexMatrix point_at(double s) const {
    return std::cos(s) * start_ + std::sin(s) * direction_;
  }

  /// Unit tangent in the direction of increasing s.
  ComplexMatrix tangent_at(double s) const {
    return -std::sin(s) * start_ + std::cos(s) * direction_;
  }

 private:
  ComplexMatrix start_;
  ComplexMatrix direction_;
  double alpha_;
};

inline constexpr double kDegenerateArcTolerance = 1e-12;

/// Spherical distance uses Re<.,.>_F: S is the unit sphere of the underlying real space.
inline GreatCircleArc great_circle(const ComplexMatrix& a0, const ComplexMatrix& a1) {
  if (a0.rows() != a1.rows() || a0.cols() != a1.cols()) {
    throw ArgumentError("great_circle: shape mismatch");
  }
  require_finite(a0, "great_circle");
  require_finite(a1, "great_circle");
  const double n0 = a0.norm();
  const double n1 = a1.norm();
  if (!(n0 > 0.0) || !(n1 > 0.0)) throw ArgumentError("great_circle: zero endpoint");
  ComplexMatrix start = a0 / n0;
  const ComplexMatrix end = a1 / n1;
  const double c = frobenius_inner(end, start).real();
  ComplexMatrix direction = end - c * start;
  const double sin_alpha = direction.norm();
  // atan2 keeps full relative accuracy near 0 and pi, where acos(c) does not.
  const double alpha = std::atan2(sin_alpha, c);
  if (sin_alpha <= kDegenerateArcTolerance || alpha >= std::numbers::pi - kDegenerateArcTolerance) {
    throw NumericalError(FailureKind::kDegenerateArc,
                         "great_circle: endpoints are real-linearly dependent");
  }
  direction /= sin_alpha;
  return GreatCircleArc(std::move(start), std::move(direction), alpha);
}

}  // namespace eigenpath
