#pragma once

// Reference eigensolver used only by tests and the bench harness. It shares no code
// path with the Newton/homotopy machinery: eigenvalues come from Aberth-Ehrlich
// iteration on the characteristic polynomial, eigenvectors from inverse iteration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "eigenpath/core_linalg.hpp"
#include "eigenpath/geometry.hpp"

namespace eigenpath::oracle {

inline constexpr int kMaxAberthSweeps = 500;
/// Eigenvalues closer than this (relative to |A|_F) flag the matrix as Sigma-near.
inline constexpr double kCollisionTolerance = 1e-8;
inline constexpr double kResidualTolerance = 1e-9;
inline constexpr double kDefectiveGapTolerance = 1e-5;

/// Coefficients c_0..c_n (c_n = 1) of det(x Id - A), via the Hessenberg recurrence.
inline std::vector<Complex> characteristic_polynomial(const ComplexMatrix& a) {
  require_square(a, "characteristic_polynomial");
  const Eigen::Index n = a.rows();
  const ComplexMatrix h = Eigen::HessenbergDecomposition<ComplexMatrix>(a).matrixH();
  auto hh = [&h](Eigen::Index i, Eigen::Index j) { return h(i - 1, j - 1); };  // 1-based

  std::vector<std::vector<Complex>> p(static_cast<std::size_t>(n + 1));
  p[0] = {Complex(1.0)};
  for (Eigen::Index k = 1; k <= n; ++k) {
    std::vector<Complex> pk(static_cast<std::size_t>(k + 1), Complex(0.0));
    const auto& prev = p[static_cast<std::size_t>(k - 1)];
    for (std::size_t d = 0; d < prev.size(); ++d) {
      pk[d + 1] += prev[d];
      pk[d] -= hh(k, k) * prev[d];
    }
    Complex sub_product(1.0);
    for (Eigen::Index i = k - 1; i >= 1; --i) {
      sub_product *= hh(i + 1, i);
      const Complex factor = hh(i, k) * sub_product;
      const auto& q = p[static_cast<std::size_t>(i - 1)];
      for (std::size_t d = 0; d < q.size(); ++d) pk[d] -= factor * q[d];
    }
    p[static_cast<std::size_t>(k)] = std::move(pk);
  }
  return p[static_cast<std::size_t>(n)];
}

namespace detail {

struct HornerValue {
  Complex p;
  Complex dp;
  double magnitude;  // sum |c_k| |z|^k, the rounding scale of p(z)
};

inline HornerValue horner(const std::vector<Complex>& c, Complex z) {
  Complex p = c.back();
  Complex dp(0.0);
  double mag = std::abs(c.back());
  const double az = std::abs(z);
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
    mag = mag * az + std::abs(c[k]);
  }
  return {p, dp, mag};
}

}  // namespace detail

/// All roots of the polynomial with coefficients c_0..c_n (c_n != 0).
inline std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs,
                                         int max_sweeps = kMaxAberthSweeps) {
  if (coeffs.size() < 2 || coeffs.back() == Complex(0.0)) {
    throw ArgumentError("aberth_roots: need a polynomial of degree >= 1");
  }
  std::vector<Complex> c = coeffs;
  const Complex lead = c.back();
  for (auto& ck : c) ck /= lead;
  const std::size_t degree = c.size() - 1;
  if (degree == 1) return {-c[0]};

  // Fujiwara-type radius, starting points on a circle around the centroid.
  double radius = 0.0;
  for (std::size_t k = 0; k < degree; ++k) {
    radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / static_cast<double>(degree - k)));
  }
  radius = std::max(radius, 1e-3);
  const Complex centroid = -c[degree - 1] / static_cast<double>(degree);
  std::vector<Complex> z(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(degree) + 0.4;
    z[k] = centroid + radius * std::polar(1.0, angle);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<bool> done(degree, false);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool all_done = true;
    for (std::size_t i = 0; i < degree; ++i) {
      if (done[i]) continue;
      const detail::HornerValue hv = detail::horner(c, z[i]);
      if (std::abs(hv.p) <= 8.0 * eps * hv.magnitude) {
        done[i] = true;
        continue;
      }
      all_done = false;
      Complex repulsion(0.0);
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      }
      Complex correction;
      if (hv.dp == Complex(0.0)) {
        correction = Complex(1e-8 * (1.0 + std::abs(z[i])), 0.0);
      } else {
        const Complex ratio = hv.p / hv.dp;
        correction = ratio / (1.0 - ratio * repulsion);
      }
      z[i] -= correction;
      if (std::abs(correction) <= 2.0 * eps * std::abs(z[i])) done[i] = true;
    }
    if (all_done) return z;
  }
  throw NumericalError(FailureKind::kOracleFailure,
                       "aberth_roots: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

struct ReferenceSpectrum {
  std::vector<EigenTriple> pairs;
  double min_gap = std::numeric_limits<double>::infinity();
  bool near_sigma = false;  // a near-collision or a numerically defective close pair
};

namespace detail {

inline ComplexVector inverse_iteration(const ComplexMatrix& a, Complex shift,
                                       const std::vector<ComplexVector>& deflate) {
  const Eigen::Index n = a.rows();
  Eigen::PartialPivLU<ComplexMatrix> lu(a - shift * identity(n));
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = Complex(1.0, 0.5 * static_cast<double>(i + 1) / static_cast<double>(n));
  }
  x.normalize();
  for (int pass = 0; pass < 2; ++pass) {
    x = lu.solve(x);
    for (const auto& q : deflate) x -= q.dot(x) * q;
    const double nx = x.norm();
    if (!(nx > 0.0) || !std::isfinite(nx)) {
      throw NumericalError(FailureKind::kOracleFailure, "inverse_iteration: breakdown");
    }
    x /= nx;
  }
  return x;
}

}  // namespace detail

/// All n eigenpairs of A, sorted by (Re, Im) of the eigenvalue.
inline ReferenceSpectrum reference_eigenpairs(const ComplexMatrix& a) {
  require_square(a, "reference_eigenpairs");
  require_finite(a, "reference_eigenpairs");
  const Eigen::Index n = a.rows();
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  ReferenceSpectrum out;

  std::vector<Complex> roots;
  if (n == 1) {
    roots = {a(0, 0)};
  } else {
    roots = aberth_roots(characteristic_polynomial(a));
  }
  std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      out.min_gap = std::min(out.min_gap, std::abs(roots[i] - roots[j]));
    }
  }
  out.near_sigma = out.min_gap < kCollisionTolerance * scale;

  const Complex nudge = 1e-14 * scale * Complex(1.0, 0.7);
  std::vector<ComplexVector> found;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    std::vector<ComplexVector> cluster;
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(roots[i] - roots[j]) < kCollisionTolerance * scale) cluster.push_back(found[j]);
    }
    Complex lambda = roots[i];
    ComplexVector x = detail::inverse_iteration(a, lambda + nudge, cluster);
    // Two-sided Rayleigh quotient sharpens the eigenvalue to second order.
    const ComplexVector y =
        detail::inverse_iteration(a.adjoint(), std::conj(lambda + nudge), {});
    const Complex yx = y.dot(x);
    const double before = (a * x - lambda * x).norm();
    if (std::abs(yx) > 1e-8) {
      const Complex refined = y.dot(a * x) / yx;
      if ((a * x - refined * x).norm() <= before) lambda = refined;
    }
    const double residual = (a * x - lambda * x).norm();
    if (!(residual <= kResidualTolerance * scale) && !out.near_sigma) {
      // A defective multiple root splits by ~sqrt(eps) in the polynomial roots; a bad
      // residual next to such a close pair means the matrix is numerically in Sigma.
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j != i) gap = std::min(gap, std::abs(roots[i] - roots[j]));
      }
      if (gap < kDefectiveGapTolerance * scale) out.near_sigma = true;
    }
    if (!(residual <= kResidualTolerance * scale) && !out.near_sigma) {
      throw NumericalError(FailureKind::kOracleFailure,
                           "reference_eigenpairs: residual " + std::to_string(residual / scale));
    }
    found.push_back(x);
    out.pairs.push_back({a, lambda, x});
  }
  return out;
}

/// Index of the pair nearest to (lambda, v) in dist_A, and the margin to the runner-up.
struct Match {
  std::size_t index = 0;
  double distance = 0.0;
  double margin = std::numeric_limits<double>::infinity();
};

inline Match nearest_pair(const ReferenceSpectrum& spectrum, const ComplexMatrix& a,
                          Complex lambda, const ComplexVector& v) {
  Match m;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spectrum.pairs.size(); ++j) {
    const auto& p = spectrum.pairs[j];
    const double d = dist_a(a, lambda, v, p.eigenvalue, p.eigenvector);
    if (d < best) {
      second = best;
      best = d;
      m.index = j;
    } else if (d < second) {
      second = d;
    }
  }
  m.distance = best;
  m.margin = second - best;
  return m;
}

/// Follows the lifting of an arc through V by nearest-neighbour matching of oracle
/// eigenpairs at increasing s.
class PathTracker {
 public:
  PathTracker(GreatCircleArc arc, const EigenTriple& start)
      : arc_(std::move(arc)), s_(0.0), lambda_(start.eigenvalue), v_(start.eigenvector) {
    const ComplexMatrix b0 = arc_.point_at(0.0);
    if ((b0 * v_ - lambda_ * v_).norm() > 1e-8 * v_.norm()) {
      throw ArgumentError("PathTracker: start is not an eigenpair of the arc origin");
    }
    advance(0.0);
  }

  const GreatCircleArc& arc() const { return arc_; }
  double s() const { return s_; }

  /// Moves to parameter s (any direction, small increments expected) and returns the
  /// continued triple at B_s.
  EigenTriple advance(double s) {
    const ComplexMatrix b = arc_.point_at(s);
    const ReferenceSpectrum spectrum = reference_eigenpairs(b);
    const Match m = nearest_pair(spectrum, b, lambda_, v_);
    // Only the tracked eigenvalue has to stay simple; other eigenvalues may coincide.
    const Complex tracked = spectrum.pairs[m.index].eigenvalue;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spectrum.pairs.size(); ++j) {
      if (j != m.index) gap = std::min(gap, std::abs(spectrum.pairs[j].eigenvalue - tracked));
    }
    const double scale = b.norm();
    if (gap < kCollisionTolerance * scale || (spectrum.near_sigma && gap < kDefectiveGapTolerance * scale)) {
      throw NumericalError(FailureKind::kSigmaCrossing,
                           "PathTracker: eigenvalue collision in (" + std::to_string(s_) + ", " +
                               std::to_string(s) + "]");
    }
    if (m.margin < 10.0 * kCollisionTolerance) {
      throw NumericalError(FailureKind::kSigmaCrossing,
                           "PathTracker: ambiguous continuation in (" + std::to_string(s_) + ", " +
                               std::to_string(s) + "]");
    }
    s_ = s;
    lambda_ = spectrum.pairs[m.index].eigenvalue;
    v_ = spectrum.pairs[m.index].eigenvector;
    return {b, lambda_, v_};
  }

 private:
  GreatCircleArc arc_;
  double s_;
  Complex lambda_;
  ComplexVector v_;
};

/// The lifted path sampled at s_k = alpha k / (samples - 1), k = 0..samples-1.
inline std::vector<EigenTriple> continue_path(const GreatCircleArc& arc, const EigenTriple& start,
                                              std::size_t samples) {
  if (samples < 2) throw ArgumentError("continue_path: need at least two samples");
  PathTracker tracker(arc, start);
  std::vector<EigenTriple> out;
  out.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = arc.alpha() * static_cast<double>(k) / static_cast<double>(samples - 1);
    out.push_back(tracker.advance(s));
  }
  return out;
}

}  // namespace eigenpath::oracle
