#pragma once

// Starting systems for the homotopy: the rank-one diagonal H, the hexagonal-lattice
// diagonal D, and the randomized (Omega_n, psi_n) construction. Also the three global
// algorithms built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eigenpath/core_linalg.hpp"
#include "eigenpath/geometry.hpp"
#include "eigenpath/homotopy.hpp"

namespace eigenpath {

/// (H, 1, e_1) with H = diag(1, 0, ..., 0).
inline EigenTriple single_start(Eigen::Index n) {
  if (n < 2) throw ArgumentError("single_start: need n >= 2");
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  h(0, 0) = 1.0;
  return {h, Complex(1.0), unit_vector(n, 0)};
}

// ---------------------------------------------------------------------------
// Hexagonal lattice

struct HexLattice {
  Eigen::Index n = 0;
  std::vector<Complex> etas;  // 0 = |eta_1| <= ... <= |eta_n|
};

inline HexLattice hex_lattice(Eigen::Index n) {
  if (n < 1) throw ArgumentError("hex_lattice: need n >= 1");
  struct Point {
    long long norm2;  // a^2 + ab + b^2 = |eta|^2
    double arg;
    Complex eta;
  };
  const long long radius = static_cast<long long>(std::ceil(2.0 * std::sqrt(static_cast<double>(n)))) + 2;
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<Point> points;
  for (long long a = -radius; a <= radius; ++a) {
    for (long long b = -radius; b <= radius; ++b) {
      const Complex eta(static_cast<double>(a) + 0.5 * static_cast<double>(b), h * static_cast<double>(b));
      double arg = std::atan2(eta.imag(), eta.real());
      if (arg < 0.0) arg += 2.0 * std::numbers::pi;
      points.push_back({a * a + a * b + b * b, arg, eta});
    }
  }
  std::sort(points.begin(), points.end(), [](const Point& x, const Point& y) {
    return x.norm2 != y.norm2 ? x.norm2 < y.norm2 : x.arg < y.arg;
  });
  // Every lattice point with |eta|^2 <= 0.4 radius^2 has |a|, |b| <= radius, so the first
  // n are the n smallest as long as they stay inside that disc.
  const long long safe = static_cast<long long>(std::floor(0.4 * static_cast<double>(radius * radius)));
  if (points[static_cast<std::size_t>(n - 1)].norm2 > safe) {
    throw NumericalError(FailureKind::kBudgetExceeded, "hex_lattice: enumeration radius too small");
  }
  HexLattice out;
  out.n = n;
  for (Eigen::Index j = 0; j < n; ++j) out.etas.push_back(points[static_cast<std::size_t>(j)].eta);
  return out;
}

struct HexStart {
  ComplexMatrix d;
  std::vector<EigenTriple> triples;  // (D, eta_j, e_j)
};

inline HexStart hex_diagonal(Eigen::Index n) {
  if (n < 2) throw ArgumentError("hex_diagonal: need n >= 2");
  const HexLattice lattice = hex_lattice(n);
  HexStart out;
  out.d = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.d(j, j) = lattice.etas[static_cast<std::size_t>(j)];
  for (Eigen::Index j = 0; j < n; ++j) {
    out.triples.push_back({out.d, lattice.etas[static_cast<std::size_t>(j)], unit_vector(n, j)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Randomized starts

struct OmegaSample {
  Complex lambda;
  ComplexVector w;  // dimension n - 1
  ComplexMatrix m;  // (n - 1) x n
  ComplexMatrix q;  // n x (n - 1), orthonormal columns spanning ker(M)-perp
};

struct OmegaDraw {
  OmegaSample sample;
  std::size_t proposals = 0;
};

inline constexpr std::size_t kMaxOmegaProposals = 1'000'000;

/// Q = H[:, 1..n-1] U where H is unitary with last column in ker(M) and U is Haar in
/// U_{n-1}, for a full-rank (n-1) x n matrix M.
inline ComplexMatrix random_cokernel_frame(RngStream& rng, const ComplexMatrix& m) {
  const Eigen::Index n = m.cols();
  if (m.rows() != n - 1 || n < 2) throw ArgumentError("random_cokernel_frame: expected (n-1) x n");
  const ComplexMatrix u = sample_haar_unitary(rng, n - 1);
  Eigen::JacobiSVD<ComplexMatrix> svd_m(m, Eigen::ComputeFullV);
  ComplexMatrix stacked(n, n);
  stacked.col(0) = svd_m.matrixV().col(n - 1);
  stacked.rightCols(n - 1) = m.adjoint();
  Eigen::HouseholderQR<ComplexMatrix> qr(stacked);
  const ComplexMatrix full_q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  // The first column of full_q spans ker(M); moving it last gives H, so the first n - 1
  // columns of H are the remaining ones.
  return full_q.rightCols(n - 1) * u;
}

inline bool omega_accepts(Complex lambda, const ComplexMatrix& mq) {
  const double n_minus_1 = static_cast<double>(mq.rows());
  return 2.0 * (std::conj(lambda) * mq.trace()).real() <= 1.0 - std::norm(lambda) * n_minus_1;
}

inline OmegaDraw sample_omega(RngStream& rng, Eigen::Index n) {
  if (n < 2) throw ArgumentError("sample_omega: need n >= 2");
  OmegaDraw out;
  while (out.proposals < kMaxOmegaProposals) {
    ++out.proposals;
    const Complex lambda = rng.complex_normal();
    ComplexMatrix m = sample_gaussian_matrix(rng, n - 1, n);
    ComplexMatrix q = random_cokernel_frame(rng, m);
    if (omega_accepts(lambda, m * q)) {
      out.sample = {lambda, sample_gaussian_vector(rng, n - 1), std::move(m), std::move(q)};
      return out;
    }
  }
  throw BudgetExceeded("sample_omega: proposal cap exhausted");
}

/// ([[lambda, w^*], [0, MQ + lambda Id]], lambda, e_1)
inline EigenTriple psi(const OmegaSample& s) {
  const Eigen::Index n = s.m.cols();
  ComplexMatrix a0 = ComplexMatrix::Zero(n, n);
  a0(0, 0) = s.lambda;
  a0.row(0).tail(n - 1) = s.w.adjoint();
  a0.bottomRightCorner(n - 1, n - 1) = s.m * s.q;
  a0.bottomRightCorner(n - 1, n - 1).diagonal().array() += s.lambda;
  return {a0, s.lambda, unit_vector(n, 0)};
}

struct RandomStart {
  EigenTriple triple;
  std::size_t proposals = 0;
};

inline RandomStart random_initial_triple(RngStream& rng, Eigen::Index n) {
  OmegaDraw d = sample_omega(rng, n);
  return {psi(d.sample), d.proposals};
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct Trick2Estimate {
  MeanEstimate lhs;  // E_M E_Q alpha(MQ)
  MeanEstimate rhs;  // E_B alpha(B) |det B|^2 / Gamma(n)
};

namespace detail {

class RunningMean {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }
  MeanEstimate estimate() const {
    const double var = count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    return {mean_, std::sqrt(var / static_cast<double>(count_))};
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace detail

/// Monte-Carlo estimates of both sides of E_M E_Q alpha(MQ) = E_B alpha(B)|det B|^2/Gamma(n).
inline Trick2Estimate montecarlo_trick2(RngStream& rng, Eigen::Index n, std::size_t trials,
                                        const std::function<double(const ComplexMatrix&)>& alpha) {
  if (n < 2) throw ArgumentError("montecarlo_trick2: need n >= 2");
  if (trials < 2) throw ArgumentError("montecarlo_trick2: need at least two trials");
  detail::RunningMean lhs;
  detail::RunningMean rhs;
  const double gamma_n = std::tgamma(static_cast<double>(n));
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix m = sample_gaussian_matrix(rng, n - 1, n);
    lhs.add(alpha(m * random_cokernel_frame(rng, m)));
    const ComplexMatrix b = sample_gaussian_matrix(rng, n - 1, n - 1);
    rhs.add(alpha(b) * std::norm(b.determinant()) / gamma_n);
  }
  return {lhs.estimate(), rhs.estimate()};
}

// ---------------------------------------------------------------------------
// Global algorithms

/// One eigenpair of A, continued from (H, 1, e_1).
inline PathResult single_eigenpair(const ComplexMatrix& a, const PathOptions& options = {}) {
  require_square(a, "single_eigenpair");
  const EigenTriple start = single_start(a.rows());
  return path_follow(a, start.matrix, {start.eigenvalue, start.eigenvector}, options);
}

struct IndexedResult {
  std::optional<PathResult> result;
  std::optional<FailureKind> failure;
  std::string message;
};

/// All n eigenpairs of A, continued from the hexagonal-lattice diagonal. Failures are
/// reported per index.
inline std::vector<IndexedResult> all_eigenpairs(const ComplexMatrix& a, const PathOptions& options = {}) {
  require_square(a, "all_eigenpairs");
  const HexStart start = hex_diagonal(a.rows());
  std::vector<IndexedResult> out;
  for (const auto& t : start.triples) {
    IndexedResult r;
    try {
      r.result = path_follow(a, start.d, {t.eigenvalue, t.eigenvector}, options);
    } catch (const NumericalError& e) {
      r.failure = e.kind();
      r.message = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct RandomSolve {
  PathResult path;
  RandomStart start;
};

/// One eigenpair of A, continued from a random psi_n start.
inline RandomSolve random_eigenpair(RngStream& rng, const ComplexMatrix& a, const PathOptions& options = {}) {
  require_square(a, "random_eigenpair");
  RandomStart start = random_initial_triple(rng, a.rows());
  PathResult path =
      path_follow(a, start.triple.matrix, {start.triple.eigenvalue, start.triple.eigenvector}, options);
  return {std::move(path), std::move(start)};
}

}  // namespace eigenpath
