#pragma once

// Dense complex linear algebra and reproducible random sampling shared by every
// other header of the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "eigenpath/errors.hpp"

namespace eigenpath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative cutoff below which a singular value counts as zero.
inline constexpr double kRankCutoff = 1e-13;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!all_finite(m)) throw ArgumentError(std::string(what) + ": non-finite entries");
}

inline void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ArgumentError(std::string(what) + ": expected a nonempty square matrix");
  }
}

/// trace(B^* A), the Hermitian Frobenius product <A, B>_F.
inline Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError("frobenius_inner: shape mismatch");
  }
  return (a.array() * b.array().conjugate()).sum();
}

inline double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

inline ComplexVector unit_vector(Eigen::Index n, Eigen::Index k) {
  ComplexVector e = ComplexVector::Zero(n);
  e(k) = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// Factorizations

struct QrFactors {
  ComplexMatrix q;  // rows x k, orthonormal columns, k = min(rows, cols)
  ComplexMatrix r;  // k x cols, upper triangular
};

inline QrFactors qr_decompose(const ComplexMatrix& a) {
  require_finite(a, "qr_decompose");
  const Eigen::Index k = std::min(a.rows(), a.cols());
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  QrFactors out;
  out.q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

struct SvdFactors {
  RealVector singular_values;  // descending
  ComplexMatrix u;             // thin
  ComplexMatrix v;             // thin
};

inline SvdFactors svd(const ComplexMatrix& a) {
  require_finite(a, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

inline RealVector singular_values(const ComplexMatrix& a) {
  require_finite(a, "singular_values");
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues();
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

/// Moore-Penrose pseudoinverse; singular values below kRankCutoff * sigma_1 are dropped.
inline ComplexMatrix pseudoinverse(const ComplexMatrix& a) {
  const SvdFactors f = svd(a);
  ComplexMatrix out = ComplexMatrix::Zero(a.cols(), a.rows());
  if (f.singular_values.size() == 0) return out;
  const double cutoff = kRankCutoff * f.singular_values(0);
  for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
    const double s = f.singular_values(i);
    if (s > cutoff && s > 0.0) out += f.v.col(i) * (1.0 / s) * f.u.col(i).adjoint();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Householder frames

/// Unitary U_v = phase * P with P = I - tau u u^* Hermitian, so that U_v e_1 = v/|v|.
/// Because the phase is a scalar, U_v^* A U_v = P A P.
class HouseholderFrame {
 public:
  explicit HouseholderFrame(const ComplexVector& v) {
    const double nv = v.norm();
    if (v.size() == 0 || !(nv > 0.0) || !std::isfinite(nv)) {
      throw ArgumentError("householder_frame: zero or non-finite vector");
    }
    const Eigen::Index n = v.size();
    const double m0 = std::abs(v(0));
    phase_ = m0 > 0.0 ? v(0) / m0 : Complex(1.0, 0.0);
    // x = conj(phase) v / |v| has x_0 = |v_0|/|v| >= 0; P maps e_1 to x.
    ComplexVector x = (std::conj(phase_) / nv) * v;
    x(0) = Complex(x(0).real(), 0.0);
    u_ = -x;
    const double tail2 = n > 1 ? x.tail(n - 1).squaredNorm() : 0.0;
    u_(0) = tail2 / (1.0 + x(0).real());  // 1 - x_0 without cancellation
    const double un2 = u_.squaredNorm();
    tau_ = un2 > 0.0 ? 2.0 / un2 : 0.0;
  }

  Eigen::Index dim() const { return u_.size(); }
  Complex phase() const { return phase_; }

  /// P x
  ComplexVector reflect(const ComplexVector& x) const {
    return x - (tau_ * u_.dot(x)) * u_;
  }

  /// U_v x
  ComplexVector apply(const ComplexVector& x) const { return phase_ * reflect(x); }

  /// U_v^* x
  ComplexVector apply_adjoint(const ComplexVector& x) const {
    return std::conj(phase_) * reflect(x);
  }

  /// U_v^* A U_v
  ComplexMatrix conjugate(const ComplexMatrix& a) const {
    ComplexMatrix b = a;
    if (tau_ == 0.0) return b;
    // left: P B = B - tau u (u^* B)
    Eigen::RowVectorXcd w = u_.adjoint() * b;
    b.noalias() -= (tau_ * u_) * w;
    // right: B P = B - tau (B u) u^*
    ComplexVector z = b * u_;
    b.noalias() -= (tau_ * z) * u_.adjoint();
    return b;
  }

  ComplexMatrix matrix() const {
    ComplexMatrix p = identity(dim());
    p.noalias() -= (tau_ * u_) * u_.adjoint();
    return phase_ * p;
  }

 private:
  ComplexVector u_;
  double tau_ = 0.0;
  Complex phase_{1.0, 0.0};
};

inline ComplexMatrix householder_frame(const ComplexVector& v) {
  return HouseholderFrame(v).matrix();
}

// ---------------------------------------------------------------------------
// Random sampling

/// Counter-based generator: draw k of stream (seed, stream_id) is a pure function of
/// (seed, stream_id, k), so parallel trials are reproducible regardless of scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(mix(master_seed) ^ mix(stream_id ^ 0xD1B54A32D192ED03ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform in (0, 1].
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// N_C(0, sigma^2): real and imaginary parts i.i.d. N(0, sigma^2/2).
  Complex complex_normal(double sigma = 1.0) {
    const double radius = sigma * std::sqrt(-std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline ComplexVector sample_gaussian_vector(RngStream& rng, Eigen::Index dim, double sigma = 1.0) {
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal(sigma);
  return v;
}

/// Entries i.i.d. N_C(center_ij, sigma^2), drawn in row-major order.
inline ComplexMatrix sample_gaussian_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                                            const ComplexMatrix& center, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("sample_gaussian_matrix: sigma must be positive");
  if (center.size() != 0 && (center.rows() != rows || center.cols() != cols)) {
    throw ArgumentError("sample_gaussian_matrix: center shape mismatch");
  }
  ComplexMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.complex_normal(sigma);
  }
  if (center.size() != 0) a += center;
  return a;
}

inline ComplexMatrix sample_gaussian_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                                            double sigma = 1.0) {
  return sample_gaussian_matrix(rng, rows, cols, ComplexMatrix(), sigma);
}

struct TruncatedDraw {
  ComplexMatrix matrix;
  std::size_t proposals = 0;
};

inline constexpr std::size_t kMaxTruncationProposals = 1'000'000;

/// center + G with G ~ N(0, sigma^2) conditioned on |G|_F <= sqrt(2) n, by rejection.
inline TruncatedDraw sample_truncated_gaussian(RngStream& rng, Eigen::Index n,
                                               const ComplexMatrix& center, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("sample_truncated_gaussian: sigma must be positive");
  if (n < 1) throw ArgumentError("sample_truncated_gaussian: n must be positive");
  const double threshold = std::sqrt(2.0) * static_cast<double>(n);
  TruncatedDraw out;
  while (out.proposals < kMaxTruncationProposals) {
    ++out.proposals;
    ComplexMatrix g = sample_gaussian_matrix(rng, n, n, sigma);
    if (g.norm() <= threshold) {
      out.matrix = center.size() == 0 ? g : ComplexMatrix(g + center);
      return out;
    }
  }
  throw BudgetExceeded("sample_truncated_gaussian: proposal cap exhausted");
}

/// Haar-distributed unitary: Q factor of a Gaussian matrix with columns rescaled by
/// r_ii/|r_ii|.
inline ComplexMatrix sample_haar_unitary(RngStream& rng, Eigen::Index n) {
  if (n < 1) throw ArgumentError("sample_haar_unitary: n must be positive");
  const QrFactors f = qr_decompose(sample_gaussian_matrix(rng, n, n));
  ComplexMatrix u = f.q;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex r = f.r(j, j);
    const double m = std::abs(r);
    if (m > 0.0) u.col(j) *= r / m;
  }
  return u;
}

}  // namespace eigenpath
