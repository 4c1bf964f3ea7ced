#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eigenpath/geometry.hpp"

using namespace eigenpath;

TEST(ProjDistance, SameClass) { EXPECT_NEAR(proj_distance(unit_vector(2, 0), 3.0 * unit_vector(2, 0)), 0.0, 1e-15); }

TEST(ProjDistance, Orthogonal) {
  EXPECT_NEAR(proj_distance(unit_vector(2, 0), unit_vector(2, 1)), std::numbers::pi / 2, 1e-15);
}

TEST(ProjDistance, QuarterPi) {
  ComplexVector w(2);
  w << 1.0, 1.0;
  EXPECT_NEAR(proj_distance(unit_vector(2, 0), w / std::sqrt(2.0)), std::numbers::pi / 4, 1e-15);
}

TEST(ProjDistance, ZeroThrows) {
  EXPECT_THROW(proj_distance(ComplexVector::Zero(2), unit_vector(2, 0)), ArgumentError);
}

TEST(ProjDistance, ScaleInvariantSymmetricTriangle) {
  RngStream rng(1, 0);
  for (int t = 0; t < 200; ++t) {
    const ComplexVector u = sample_gaussian_vector(rng, 4);
    const ComplexVector v = sample_gaussian_vector(rng, 4);
    const ComplexVector w = sample_gaussian_vector(rng, 4);
    const Complex s = rng.complex_normal();
    EXPECT_NEAR(proj_distance(u, v), proj_distance(s * u, v), 1e-12);
    EXPECT_NEAR(proj_distance(u, v), proj_distance(v, u), 1e-12);
    EXPECT_LE(proj_distance(u, w), proj_distance(u, v) + proj_distance(v, w) + 1e-12);
  }
}

TEST(TripleDistance, Examples) {
  const ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  const EigenTriple p{a, 1.0, unit_vector(2, 0)};
  EXPECT_EQ(triple_distance(p, p), 0.0);
  EXPECT_NEAR(triple_distance(p, {a, 2.0, unit_vector(2, 0)}), 1.0, 1e-15);
  ComplexMatrix a2 = a;
  a2(0, 0) += 1.0;
  EXPECT_NEAR(triple_distance(p, {a2, 1.0, unit_vector(2, 0)}), 1.0, 1e-15);
}

TEST(DistA, Examples) {
  const ComplexMatrix a = 2.0 * ComplexMatrix::Identity(1, 1);
  EXPECT_EQ(dist_a(a, 0.5, unit_vector(1, 0), 0.5, unit_vector(1, 0)), 0.0);
  EXPECT_NEAR(dist_a(a, 0.5, unit_vector(1, 0), 2.5, unit_vector(1, 0)), 1.0, 1e-15);
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 0) = 1.0;
  EXPECT_NEAR(dist_a(b, 1.0, unit_vector(2, 0), 1.0, unit_vector(2, 1)), std::numbers::pi / 2, 1e-15);
  EXPECT_THROW(dist_a(ComplexMatrix::Zero(2, 2), 0.0, unit_vector(2, 0), 0.0, unit_vector(2, 0)), ArgumentError);
}

TEST(DistA, AgreesWithTripleDistanceOnUnitSphere) {
  RngStream rng(2, 0);
  ComplexMatrix a = sample_gaussian_matrix(rng, 3, 3);
  a /= a.norm();
  const ComplexVector v = sample_gaussian_vector(rng, 3), w = sample_gaussian_vector(rng, 3);
  EXPECT_NEAR(dist_a(a, 0.3, v, Complex(0.1, 0.2), w), triple_distance({a, 0.3, v}, {a, Complex(0.1, 0.2), w}),
              1e-14);
}

TEST(GreatCircle, HandComputedExample) {
  ComplexMatrix a0 = ComplexMatrix::Zero(2, 2), a1 = ComplexMatrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a1(0, 0) = 2.0 / std::sqrt(5.0);
  a1(1, 1) = 1.0 / std::sqrt(5.0);
  const GreatCircleArc arc = great_circle(a0, a1);
  EXPECT_NEAR(arc.alpha(), std::acos(2.0 / std::sqrt(5.0)), 1e-15);
  EXPECT_NEAR(arc.alpha(), 0.46365, 1e-5);
  ComplexMatrix w = ComplexMatrix::Zero(2, 2);
  w(1, 1) = 1.0;
  EXPECT_LE((arc.direction() - w).norm(), 1e-15);
}

TEST(GreatCircle, ArcInvariants) {
  RngStream rng(3, 0);
  const ComplexMatrix a0 = sample_gaussian_matrix(rng, 3, 3);
  const ComplexMatrix a1 = sample_gaussian_matrix(rng, 3, 3);
  const GreatCircleArc arc = great_circle(a0, a1);
  EXPECT_NEAR(arc.start().norm(), 1.0, 1e-12);
  EXPECT_NEAR(arc.direction().norm(), 1.0, 1e-12);
  EXPECT_NEAR(frobenius_inner(arc.start(), arc.direction()).real(), 0.0, 1e-12);
  EXPECT_GT(arc.alpha(), 0.0);
  EXPECT_LT(arc.alpha(), std::numbers::pi);
  EXPECT_LE((arc.point_at(0.0) - a0 / a0.norm()).norm(), 1e-12);
  EXPECT_LE((arc.point_at(arc.alpha()) - a1 / a1.norm()).norm(), 1e-12);
  for (int k = 0; k < 100; ++k) {
    const double s = arc.alpha() * k / 99.0;
    EXPECT_NEAR(arc.point_at(s).norm(), 1.0, 1e-12);
    EXPECT_NEAR(arc.tangent_at(s).norm(), 1.0, 1e-12);
    EXPECT_NEAR(frobenius_inner(arc.point_at(s), arc.tangent_at(s)).real(), 0.0, 1e-12);
  }
}

TEST(GreatCircle, LinearInterpolationTracesArc) {
  RngStream rng(4, 0);
  const ComplexMatrix a0 = sample_gaussian_matrix(rng, 3, 3);
  const ComplexMatrix a1 = sample_gaussian_matrix(rng, 3, 3);
  const GreatCircleArc arc = great_circle(a0, a1);
  for (int k = 0; k <= 20; ++k) {
    const double t = k / 20.0;
    ComplexMatrix at = (1.0 - t) * a0 + t * a1;
    at /= at.norm();
    // Project onto span{start, direction} and read the angle.
    const double x = frobenius_inner(at, arc.start()).real();
    const double y = frobenius_inner(at, arc.direction()).real();
    const double s = std::atan2(y, x);
    EXPECT_GE(s, -1e-12);
    EXPECT_LE(s, arc.alpha() + 1e-12);
    EXPECT_LE((arc.point_at(s) - at).norm(), 1e-10);
  }
}

TEST(GreatCircle, DegenerateEndpoints) {
  RngStream rng(5, 0);
  const ComplexMatrix a0 = sample_gaussian_matrix(rng, 3, 3);
  try {
    great_circle(a0, 3.0 * a0);
    FAIL() << "expected degenerate arc";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), FailureKind::kDegenerateArc);
  }
  EXPECT_THROW(great_circle(a0, -2.0 * a0), NumericalError);
  // A complex multiple is not real-linearly dependent.
  EXPECT_NO_THROW(great_circle(a0, Complex(0.0, 1.0) * a0));
  EXPECT_THROW(great_circle(a0, ComplexMatrix::Zero(3, 3)), ArgumentError);
}
