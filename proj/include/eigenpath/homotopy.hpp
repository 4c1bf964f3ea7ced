#pragma once

// Certified path following along great circles of the unit sphere of matrices: the
// step-size controller, the continuation loop and the condition-length ceiling.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "eigenpath/conditioning.hpp"
#include "eigenpath/geometry.hpp"
#include "eigenpath/newton.hpp"
#include "eigenpath/oracle.hpp"

namespace eigenpath {

/// The coupled constants of the step-size analysis. Only c1 and cu are used by the
/// controller; the rest bound the step count.
struct ConstantLedger {
  double c1_prime = 1e-3;
  double c1 = 0.0;
  double cu_prime = 1e-3;
  double cu = 0.0;
  double c_star = 1e-4;
  double K = 64.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double c6 = 0.0;
  double c7 = 0.0;

  double C() const { return 1.0 / c7; }
  /// Step floor: every step satisfies ds >= R / mu^2.
  double R() const { return c7 / (6.0 * std::pow(1.0 + 4.0 * std::sqrt(3.0) * c4, 2)); }

  static ConstantLedger standard() {
    ConstantLedger l;
    const double s3 = std::sqrt(3.0);
    l.c1 = s3 * l.c1_prime;
    l.cu = s3 * l.cu_prime + 3.0 * l.c1 * l.c1 * (s3 - 1.0) / (2.0 * (1.0 - 3.0 * l.c1));
    l.c4 = l.c_star + (1.0 + 4.0 * s3 * l.c_star) * (l.c1 + 2.0 * l.cu);
    l.c5 = l.cu_prime / (1.0 + 4.0 * s3 * l.c_star) -
           2.0 * (2.0 * l.c_star + 1.5 * l.c1 * l.c1 * (1.0 + 4.0 * s3 * l.c_star)) / (1.0 - 3.0 * l.c1);
    l.finish();
    return l;
  }

  /// Variant with c5 = cu'/(1 + 4 sqrt(3) c_*), which reproduces the rounded tabulated
  /// c5 ~ 0.00099 and c6 = c7 ~ 0.00038.
  static ConstantLedger tabulated() {
    ConstantLedger l = standard();
    l.c5 = l.cu_prime / (1.0 + 4.0 * std::sqrt(3.0) * l.c_star);
    l.finish();
    return l;
  }

  /// Throws unless every defining inequality holds.
  void validate() const {
    const double s3 = std::sqrt(3.0);
    auto require = [](bool ok, const char* what) {
      if (!ok) throw ArgumentError(std::string("ConstantLedger: violated ") + what);
    };
    require(s3 * c1_prime <= c1 * (1.0 + 1e-15) && c1 < 0.5, "sqrt(3) c1' <= c1 < 1/2");
    require(c1 < 1.0 / 3.0, "c1 < 1/3");
    require(s3 * cu_prime <= (cu - 1.5 * c1 * c1 * (s3 - 1.0) / (1.0 - 3.0 * c1)) * (1.0 + 1e-12),
            "sqrt(3) cu' <= cu - 3/2 c1^2 (sqrt(3) - 1)/(1 - 3 c1)");
    require(4.0 * s3 * c_star < 1.0, "4 sqrt(3) c_* < 1");
    require(4.0 * s3 * c4 < 1.0, "4 sqrt(3) c4 < 1");
    const double lhs = 2.0 * (1.0 + 4.0 * s3 * c_star) * (1.0 + 4.0 * s3 * c4) * cu;
    require(lhs < K * c_star && K * c_star < 0.2, "2(1+4sqrt3 c*)(1+4sqrt3 c4) cu < K c* < 1/5");
    require(c5 > 0.0 && c6 > 0.0 && c7 > 0.0, "positivity of c5, c6, c7");
  }

 private:
  void finish() {
    const double s3 = std::sqrt(3.0);
    c6 = (c5 * (1.0 - 3.0 * c1) - 2.0 * (1.0 + 3.0 * c1) * c_star) /
         (2.0 * (1.0 + 3.0 * c1) * (1.0 + 4.0 * s3 * c4));
    c7 = std::min(c1_prime / ((1.0 + 4.0 * s3 * c4) * (1.0 + 4.0 * s3 * c_star)), c6);
  }
};

struct StepChoice {
  double mu = 0.0;
  double r = 0.0;  // mu estimate, mu <= r <= sqrt(3) mu
  double phi = 0.0;
  double beta = 0.0;
  double s_prime = 0.0;
  double s_double_prime = 0.0;
  double delta_s = 0.0;
};

/// Arc-length advance for B, A_dot on the unit sphere and (zeta, w) with |w| = 1.
inline StepChoice choose_step(const ComplexMatrix& b, const ComplexMatrix& a_dot, const ApproxEigenpair& p,
                              const ConstantLedger& k = ConstantLedger::standard()) {
  std::optional<LocalLinearization> lin;
  try {
    lin.emplace(b, p);
  } catch (const NumericalError&) {
    throw NumericalError(FailureKind::kIllPosed, "choose_step: singular reduced operator");
  }
  StepChoice out;
  out.mu = lin->mu();
  if (!std::isfinite(out.mu)) {
    throw NumericalError(FailureKind::kIllPosed, "choose_step: singular reduced operator");
  }
  out.r = out.mu;
  out.s_prime = k.c1 / out.r;
  out.phi = lin->phi(a_dot);
  out.beta = lin->step().beta;
  const double numerator =
      (k.cu / out.r) * (1.0 - 3.0 * k.c1) - out.beta - 1.5 * k.c1 * k.c1 * std::sqrt(3.0) / out.r;
  if (!(numerator > 0.0)) {
    throw NumericalError(FailureKind::kPathFailure, "choose_step: Newton step too long to certify");
  }
  out.s_double_prime = out.phi > 0.0 ? numerator / out.phi : std::numeric_limits<double>::infinity();
  out.delta_s = std::min(out.s_prime, out.s_double_prime);
  return out;
}

struct StepRecord {
  std::uint64_t index = 0;
  double s = 0.0;   // s_i, where the step was chosen
  double ds = 0.0;  // s_{i+1} - s_i as taken
  double r = 0.0;
  double phi = 0.0;
  double beta = 0.0;
  Complex zeta;     // after the Newton corrections, before rescaling
  double seconds = 0.0;
};

struct HomotopyTrace {
  std::vector<StepRecord> records;  // filled only when requested
  std::uint64_t steps = 0;
  double alpha = 0.0;
  bool completed = false;
};

struct PathOptions {
  ConstantLedger ledger = ConstantLedger::standard();
  std::uint64_t max_steps = 1'000'000'000ULL;
  bool record_steps = false;
  /// Called after each accepted step with the record, the new iterate and B_{s_{i+1}}.
  std::function<void(const StepRecord&, const ApproxEigenpair&, const ComplexMatrix&)> observer;
};

struct PathResult {
  ApproxEigenpair pair;
  HomotopyTrace trace;
};

/// Follows the lifting of the great circle from A0 to A starting at an approximate
/// eigenpair (zeta0, w0) of A0, and returns an approximate eigenpair of A.
inline PathResult path_follow(const ComplexMatrix& a, const ComplexMatrix& a0, const ApproxEigenpair& p0,
                              const PathOptions& options = {}) {
  require_square(a, "path_follow");
  if (p0.w.size() != a.rows()) throw ArgumentError("path_follow: dimension mismatch");
  require_finite(p0.w, "path_follow");
  if (!std::isfinite(p0.zeta.real()) || !std::isfinite(p0.zeta.imag())) {
    throw ArgumentError("path_follow: non-finite zeta");
  }
  const double nw = p0.w.norm();
  if (!(nw > 0.0)) throw ArgumentError("path_follow: zero start vector");

  const GreatCircleArc arc = great_circle(a0, a);
  const double scale_a = a.norm();
  ApproxEigenpair p{p0.zeta / a0.norm(), p0.w / nw};

  PathResult result;
  result.trace.alpha = arc.alpha();
  double s = 0.0;
  ComplexMatrix b = arc.start();
  using Clock = std::chrono::steady_clock;
  while (s < arc.alpha()) {
    if (result.trace.steps >= options.max_steps) {
      throw BudgetExceeded("path_follow: step cap of " + std::to_string(options.max_steps) + " reached");
    }
    const auto t0 = Clock::now();
    StepRecord rec;
    rec.index = result.trace.steps;
    rec.s = s;
    try {
      const StepChoice choice = choose_step(b, arc.tangent_at(s), p, options.ledger);
      const double s_next = std::min(arc.alpha(), s + choice.delta_s);
      if (!(s_next > s)) {
        throw NumericalError(FailureKind::kPathFailure, "path_follow: step underflow");
      }
      b = arc.point_at(s_next);
      for (int k = 0; k < 3; ++k) p = newton_step(b, p).first;
      rec.ds = s_next - s;
      rec.r = choice.r;
      rec.phi = choice.phi;
      rec.beta = choice.beta;
      s = s_next;
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const NumericalError& e) {
      throw NumericalError(FailureKind::kPathFailure,
                           "path_follow: at s = " + std::to_string(s) + ": " + e.what());
    }
    rec.zeta = p.zeta;
    const double mz = std::abs(p.zeta);
    if (mz > 1.0) p.zeta /= mz;
    ++result.trace.steps;
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (options.observer) options.observer(rec, p, b);
    if (options.record_steps) result.trace.records.push_back(rec);
  }
  result.trace.completed = true;
  result.pair = {scale_a * p.zeta, p.w};
  return result;
}

// ---------------------------------------------------------------------------
// Condition length along the lifted path (test and benchmark utility)

/// Lifted path of an arc followed by the oracle, exposing the condition-length integrand.
class LiftedPath {
 public:
  /// The start pair is matched to the nearest true eigenpair of the arc origin.
  LiftedPath(const GreatCircleArc& arc, Complex zeta0, const ComplexVector& w0)
      : tracker_(arc, nearest_start(arc, zeta0, w0)) {}

  const GreatCircleArc& arc() const { return tracker_.arc(); }

  EigenTriple at(double s) { return tracker_.advance(s); }

  double integrand(double s) {
    const EigenTriple t = tracker_.advance(s);
    return lifted_velocity(t.matrix, arc().tangent_at(s), t.eigenvalue, t.eigenvector).condition_speed();
  }

  /// Composite trapezoid rule with `points` nodes on [s0, s1]; advances monotonically.
  double trapezoid(double s0, double s1, std::size_t points) {
    if (points < 2) throw ArgumentError("trapezoid: need at least two points");
    const double h = (s1 - s0) / static_cast<double>(points - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double f = integrand(s0 + h * static_cast<double>(k));
      acc += (k == 0 || k + 1 == points) ? 0.5 * f : f;
    }
    return acc * h;
  }

  /// Simpson's rule with two panels on [s0, s1].
  double simpson(double s0, double s1) {
    const double fa = integrand(s0);
    const double fm = integrand(0.5 * (s0 + s1));
    const double fb = integrand(s1);
    return (s1 - s0) * (fa + 4.0 * fm + fb) / 6.0;
  }

 private:
  static EigenTriple nearest_start(const GreatCircleArc& arc, Complex zeta0, const ComplexVector& w0) {
    const ComplexMatrix b0 = arc.point_at(0.0);
    const oracle::ReferenceSpectrum spectrum = oracle::reference_eigenpairs(b0);
    const oracle::Match m = oracle::nearest_pair(spectrum, b0, zeta0, w0);
    return spectrum.pairs[m.index];
  }

  oracle::PathTracker tracker_;
};

/// C times the condition length of the lifted path, by the trapezoid rule.
inline double step_count_ceiling(const ComplexMatrix& a, const ComplexMatrix& a0, const ApproxEigenpair& p0,
                                 std::size_t quadrature_points,
                                 const ConstantLedger& k = ConstantLedger::standard()) {
  const GreatCircleArc arc = great_circle(a0, a);
  LiftedPath path(arc, p0.zeta / a0.norm(), p0.w);
  return k.C() * path.trapezoid(0.0, arc.alpha(), quadrature_points);
}

}  // namespace eigenpath
