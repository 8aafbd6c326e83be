#pragma once

#include <complex>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "csifb/error.hpp"

namespace csifb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative eigenvalue threshold below which a mode counts as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// log(pi * e); differential entropies of circularly symmetric Gaussians
/// are r * log(pi e) + log pseudo-determinant, in nats.
inline constexpr double kLogPiE = 2.1447298858494002;

/// Eigendecomposition of a Hermitian matrix with a rank decision attached.
///
/// Eigenvalues are sorted descending and negatives within the round-off
/// band [-rank_tol * lambda_max, 0] are clamped to zero. `rank` counts the
/// eigenvalues strictly above rank_tol * lambda_max.
struct Spectrum {
  RealVector eigenvalues;  // descending, clamped at zero
  Matrix eigenvectors;     // unitary, columns match eigenvalues
  Index rank = 0;
  double rank_tol = kDefaultRankTol;

  /// Smallest eigenvalue still counted in the rank; 0 when rank == 0.
  double min_positive() const {
    return rank > 0 ? eigenvalues(rank - 1) : 0.0;
  }
  double max_eigenvalue() const {
    return eigenvalues.size() > 0 ? eigenvalues(0) : 0.0;
  }
  double trace() const { return eigenvalues.sum(); }
};

/// Decompose a Hermitian matrix. Throws NotHermitian if the input is not
/// conjugate-symmetric to round-off, IndefiniteMatrix if an eigenvalue is
/// negative beyond the clamping band.
Spectrum eigh(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Sum of natural logs of the eigenvalues above the rank threshold.
/// Zero for the all-zero matrix (empty product).
double pseudo_logdet(const Matrix& m, double rank_tol = kDefaultRankTol);
double pseudo_logdet(const Spectrum& spectrum);

/// Digamma function for x > 0, accurate to ~1e-12 absolute. Uses the
/// ascending recurrence below 10 and the asymptotic series above.
double digamma(double x);

/// Deterministic counter-based random stream (splitmix64 core). A given
/// seed and call sequence reproduces bit-identical output; independent
/// substreams for e.g. per-trial parallelism come from derive().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Next raw 64-bit word of the stream.
  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (one variate per call).
  double normal();

  /// Circularly symmetric complex Gaussian CN(0, variance); real and
  /// imaginary parts are independent N(0, variance / 2).
  Complex complex_gaussian(double variance);
  Vector complex_gaussian_vector(Index n, double variance);

  /// Independent substream addressed by `stream`; the mapping is a fixed
  /// hash of (seed, stream) so results do not depend on evaluation order.
  Rng derive(std::uint64_t stream) const {
    return Rng(derive_seed(seed_, stream));
  }
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

/// i.i.d. CN(0, variance) samples; variance must be strictly positive.
Vector sample_complex_gaussian(Rng& rng, Index n, double variance);

/// Pairwise (cascade) summation; deterministic and drift-resistant.
double pairwise_sum(std::span<const double> values);

/// Mean and standard error of a sample, via pairwise summation.
struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t count = 0;
};
SampleStats summarize(std::span<const double> values);

}  // namespace csifb
