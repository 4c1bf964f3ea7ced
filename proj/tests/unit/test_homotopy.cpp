#include <gtest/gtest.h>

#include <cmath>

#include "eigenpath/homotopy.hpp"
#include "eigenpath/initial_triples.hpp"

using namespace eigenpath;

namespace {

ComplexMatrix diag(std::initializer_list<Complex> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex z : d) m(i, i) = z, ++i;
  return m;
}

double relative_residual(const ComplexMatrix& a, const ApproxEigenpair& p) {
  return (a * p.w - p.zeta * p.w).norm() / (a.norm() * p.w.norm());
}

}  // namespace

TEST(ConstantLedger, StandardValues) {
  const ConstantLedger k = ConstantLedger::standard();
  EXPECT_NO_THROW(k.validate());
  EXPECT_NEAR(k.c1, 0.001732050808, 1e-12);
  EXPECT_NEAR(k.cu, 0.001735362243, 1e-12);
  EXPECT_NEAR(k.c4, 0.005306379882, 1e-12);
  EXPECT_NEAR(k.c5, 0.0005881650644, 1e-13);
  EXPECT_NEAR(k.c6, 0.0001842677741, 1e-13);
  EXPECT_DOUBLE_EQ(k.c7, k.c6);
  EXPECT_NEAR(k.C(), 5426.88, 0.01);
  EXPECT_NEAR(k.R(), 2.85719e-05, 1e-10);
}

TEST(ConstantLedger, TabulatedVariant) {
  const ConstantLedger k = ConstantLedger::tabulated();
  EXPECT_NO_THROW(k.validate());
  EXPECT_NEAR(k.c4, 0.005306, 1e-6);
  EXPECT_NEAR(k.c5, 0.00099, 1e-5);
  EXPECT_NEAR(k.c6, 0.00038, 1e-5);
  EXPECT_NEAR(k.c7, 0.00038, 1e-5);
  EXPECT_LE(k.C(), 3000.0);
}

TEST(ConstantLedger, ValidateRejectsBrokenLedger) {
  ConstantLedger k = ConstantLedger::standard();
  k.c_star = 0.2;
  EXPECT_THROW(k.validate(), ArgumentError);
  k = ConstantLedger::standard();
  k.K = 1e4;
  EXPECT_THROW(k.validate(), ArgumentError);
}

TEST(ChooseStep, DiagonalExampleHasZeroPhi) {
  const ConstantLedger k = ConstantLedger::standard();
  const StepChoice c = choose_step(diag({1.0, 0.0}), diag({0.0, 1.0}), {1.0, unit_vector(2, 0)});
  EXPECT_NEAR(c.mu, 1.0, 1e-15);
  EXPECT_NEAR(c.r, 1.0, 1e-15);
  EXPECT_EQ(c.phi, 0.0);
  EXPECT_TRUE(std::isinf(c.s_double_prime));
  EXPECT_DOUBLE_EQ(c.s_prime, k.c1);
  EXPECT_DOUBLE_EQ(c.delta_s, k.c1);
}

TEST(ChooseStep, SingularPointIsIllPosed) {
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 1) = 1.0;
  try {
    choose_step(b, diag({1.0, 0.0}), {0.0, unit_vector(2, 0)});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), FailureKind::kIllPosed);
  }
}

TEST(ChooseStep, UncertifiablePairIsPathFailure) {
  // beta = 0.5 exceeds every admissible Newton length.
  const ComplexMatrix b = diag({1.0, 0.0});
  try {
    choose_step(b, diag({0.0, 1.0}), {1.5, unit_vector(2, 0)});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), FailureKind::kPathFailure);
  }
}

TEST(PathFollow, DiagonalArc) {
  const PathResult r = path_follow(diag({2.0, 1.0}), diag({1.0, 0.0}), {1.0, unit_vector(2, 0)});
  EXPECT_TRUE(r.trace.completed);
  EXPECT_NEAR(std::abs(r.pair.zeta - 2.0), 0.0, 1e-10);
  EXPECT_NEAR(proj_distance(r.pair.w, unit_vector(2, 0)), 0.0, 1e-10);
  EXPECT_NEAR(r.trace.alpha, std::acos(2.0 / std::sqrt(5.0)), 1e-14);
}

TEST(PathFollow, DegenerateArc) {
  const EigenTriple h = single_start(3);
  try {
    path_follow(3.0 * h.matrix, h.matrix, {h.eigenvalue, h.eigenvector});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), FailureKind::kDegenerateArc);
  }
}

TEST(PathFollow, ArgumentChecks) {
  const EigenTriple h = single_start(3);
  const ComplexMatrix a = diag({1.0, 2.0, 3.0});
  EXPECT_THROW(path_follow(a, h.matrix, {1.0, ComplexVector::Zero(3)}), ArgumentError);
  EXPECT_THROW(path_follow(a, h.matrix, {1.0, unit_vector(2, 0)}), ArgumentError);
}

TEST(PathFollow, GaussianOutputIsAccurate) {
  RngStream rng(2, 0);
  for (int t = 0; t < 3; ++t) {
    const ComplexMatrix a = sample_gaussian_matrix(rng, 8, 8);
    const PathResult r = single_eigenpair(a);
    const ComplexMatrix an = a / a.norm();
    const ApproxEigenpair p = newton_iterate(an, {r.pair.zeta / a.norm(), r.pair.w}, 2);
    EXPECT_LE(relative_residual(an, p), 1e-8);
    EXPECT_LE(relative_residual(a, r.pair), 1e-6);
  }
}

TEST(PathFollow, ScaleInvariance) {
  RngStream rng(3, 0);
  const ComplexMatrix a = sample_gaussian_matrix(rng, 5, 5);
  const PathResult x = single_eigenpair(a);
  const PathResult y = single_eigenpair(2.0 * a);
  EXPECT_EQ(x.trace.steps, y.trace.steps);
  EXPECT_NEAR(std::abs(y.pair.zeta - 2.0 * x.pair.zeta), 0.0, 1e-12 * std::abs(y.pair.zeta));
  EXPECT_LE((x.pair.w - y.pair.w).norm(), 1e-12);
}

TEST(PathFollow, TraceIsMonotoneAndRespectsStepBounds) {
  RngStream rng(4, 0);
  const ComplexMatrix a = sample_gaussian_matrix(rng, 5, 5);
  PathOptions opts;
  opts.record_steps = true;
  const PathResult r = single_eigenpair(a, opts);
  ASSERT_EQ(r.trace.records.size(), r.trace.steps);
  ASSERT_GT(r.trace.steps, 1u);
  const ConstantLedger& k = opts.ledger;
  double s = 0.0;
  for (std::size_t i = 0; i < r.trace.records.size(); ++i) {
    const StepRecord& rec = r.trace.records[i];
    EXPECT_EQ(rec.index, i);
    EXPECT_DOUBLE_EQ(rec.s, s);
    EXPECT_GT(rec.ds, 0.0);
    EXPECT_LE(rec.ds, k.c1 / rec.r * (1 + 1e-12));
    // The final step is truncated at s = alpha.
    if (i + 1 < r.trace.records.size()) {
      EXPECT_GE(rec.ds, k.R() / (rec.r * rec.r));
    }
    s += rec.ds;
  }
  EXPECT_NEAR(s, r.trace.alpha, 1e-12);
}

TEST(PathFollow, StepBudget) {
  RngStream rng(5, 0);
  const ComplexMatrix a = sample_gaussian_matrix(rng, 5, 5);
  PathOptions opts;
  opts.max_steps = 5;
  try {
    single_eigenpair(a, opts);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), FailureKind::kBudgetExceeded);
  }
}

TEST(PathFollow, IteratesStayInTheContinuationNeighbourhood) {
  RngStream rng(6, 0);
  const ComplexMatrix a = sample_gaussian_matrix(rng, 4, 4);
  const EigenTriple h = single_start(4);
  const GreatCircleArc arc = great_circle(h.matrix, a);
  oracle::PathTracker tracker(arc, h);
  const ConstantLedger k = ConstantLedger::standard();
  std::size_t observed = 0;
  double worst = 0.0;
  PathOptions opts;
  opts.observer = [&](const StepRecord& rec, const ApproxEigenpair& p, const ComplexMatrix& b) {
    const EigenTriple t = tracker.advance(rec.s + rec.ds);
    EXPECT_LE((t.matrix - b).norm(), 1e-12);
    const double m = mu(b, t.eigenvalue, t.eigenvector);
    const double d = dist_a(b, rec.zeta, p.w, t.eigenvalue, t.eigenvector);
    worst = std::max(worst, d * m / k.c_star);
    EXPECT_LE(std::abs(rec.zeta), 1.0 + k.c_star / (2.0 * m));
    EXPECT_LE(std::abs(p.zeta), 1.0 + 1e-15);
    ++observed;
  };
  const PathResult r = path_follow(a, h.matrix, {h.eigenvalue, h.eigenvector}, opts);
  EXPECT_EQ(observed, r.trace.steps);
  EXPECT_LE(worst, 1.0);
}

TEST(StepCountCeiling, BoundsObservedSteps) {
  RngStream rng(7, 0);
  const ComplexMatrix a = sample_gaussian_matrix(rng, 4, 4);
  const EigenTriple h = single_start(4);
  const PathResult r = single_eigenpair(a);
  const double ceiling = step_count_ceiling(a, h.matrix, {h.eigenvalue, h.eigenvector}, 2000);
  EXPECT_TRUE(std::isfinite(ceiling));
  EXPECT_LE(static_cast<double>(r.trace.steps), std::ceil(ceiling));
  // Each full step consumes at least c7 of condition length.
  const ConstantLedger k = ConstantLedger::standard();
  EXPECT_GE(ceiling / k.C(), k.c7 * static_cast<double>(r.trace.steps - 1));
}

TEST(LiftedPath, SpeedBoundAlongPath) {
  RngStream rng(8, 0);
  const GreatCircleArc arc = great_circle(single_start(4).matrix, sample_gaussian_matrix(rng, 4, 4));
  LiftedPath path(arc, 1.0, unit_vector(4, 0));
  for (int k = 0; k <= 50; ++k) {
    const double s = arc.alpha() * k / 50.0;
    const EigenTriple t = path.at(s);
    const LiftedVelocity v = lifted_velocity(t.matrix, arc.tangent_at(s), t.eigenvalue, t.eigenvector);
    EXPECT_LE(v.speed, std::sqrt(6.0) * v.mu);
    EXPECT_GE(v.speed, 1.0);
  }
}
