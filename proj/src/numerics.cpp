#include "csifb/numerics.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace csifb {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::IndefiniteMatrix: return "IndefiniteMatrix";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::TierLevelsNotOrdered: return "TierLevelsNotOrdered";
    case ErrorCode::DuplicateSubcarrier: return "DuplicateSubcarrier";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DistortionOutOfRange: return "DistortionOutOfRange";
    case ErrorCode::DistortionBelowMmse: return "DistortionBelowMmse";
    case ErrorCode::BudgetNonpositive: return "BudgetNonpositive";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::TooManySkipped: return "TooManySkipped";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace {

// Relative Frobenius tolerance for the Hermitian input check.
constexpr double kHermitianCheckTol = 1e-11;

}  // namespace

Spectrum eigh(const Matrix& m, double rank_tol) {
  if (m.rows() != m.cols()) {
    raise(ErrorCode::DimensionMismatch, "eigh: matrix is not square");
  }
  if (rank_tol < 0.0 || !(rank_tol < 1.0)) {
    raise(ErrorCode::InvalidArgument, "eigh: rank_tol must be in [0, 1)");
  }
  const double scale = m.norm();
  const double asym = (m - m.adjoint()).norm();
  if (asym > kHermitianCheckTol * std::max(scale, 1e-300)) {
    std::ostringstream oss;
    oss << "eigh: matrix is not Hermitian (relative asymmetry "
        << asym / std::max(scale, 1e-300) << ")";
    raise(ErrorCode::NotHermitian, oss.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::NumericalFailure, "eigh: eigendecomposition failed");
  }

  Spectrum sp;
  sp.rank_tol = rank_tol;
  sp.eigenvalues = solver.eigenvalues().reverse();
  sp.eigenvectors = solver.eigenvectors().rowwise().reverse();

  const double lam_max = std::max(sp.eigenvalues.size() > 0 ? sp.eigenvalues(0) : 0.0, 0.0);
  const double floor = rank_tol * lam_max;
  for (Index i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.eigenvalues(i) < 0.0) {
      if (-sp.eigenvalues(i) <= floor) {
        sp.eigenvalues(i) = 0.0;
      } else {
        std::ostringstream oss;
        oss << "eigh: eigenvalue " << sp.eigenvalues(i)
            << " below -rank_tol * lambda_max = " << -floor;
        raise(ErrorCode::IndefiniteMatrix, oss.str());
      }
    }
  }
  sp.rank = 0;
  for (Index i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.eigenvalues(i) > floor) ++sp.rank;
  }
  return sp;
}

double pseudo_logdet(const Spectrum& spectrum) {
  double sum = 0.0;
  for (Index i = 0; i < spectrum.rank; ++i) {
    sum += std::log(spectrum.eigenvalues(i));
  }
  return sum;
}

double pseudo_logdet(const Matrix& m, double rank_tol) {
  return pseudo_logdet(eigh(m, rank_tol));
}

double digamma(double x) {
  if (!(x > 0.0)) {
    raise(ErrorCode::DomainError, "digamma: argument must be positive");
  }
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series in 1/x^2; the first dropped term is O(x^-16).
  const double inv = 1.0 / x;
  const double z = inv * inv;
  const double tail =
      z * (1.0 / 12.0 -
           z * (1.0 / 120.0 -
                z * (1.0 / 252.0 -
                     z * (1.0 / 240.0 -
                          z * (1.0 / 132.0 -
                               z * (691.0 / 32760.0 - z * (1.0 / 12.0)))))));
  return result + std::log(x) - 0.5 * inv - tail;
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // Finalize (seed xor hash(stream)) so neighbouring streams decorrelate.
  auto mix = [](std::uint64_t v) {
    v += 0x9E3779B97F4A7C15ULL;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
    return v ^ (v >> 31);
  };
  return mix(seed ^ mix(stream + 0xD1B54A32D192ED03ULL));
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Complex Rng::complex_gaussian(double variance) {
  if (!(variance > 0.0)) {
    raise(ErrorCode::InvalidArgument,
          "complex_gaussian: variance must be positive");
  }
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-variance * std::log(u1));
  return Complex(radius * std::cos(kTwoPi * u2),
                 radius * std::sin(kTwoPi * u2));
}

Vector Rng::complex_gaussian_vector(Index n, double variance) {
  if (n < 0) {
    raise(ErrorCode::InvalidArgument, "complex_gaussian_vector: negative size");
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = complex_gaussian(variance);
  return out;
}

Vector sample_complex_gaussian(Rng& rng, Index n, double variance) {
  return rng.complex_gaussian_vector(n, variance);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleStats summarize(std::span<const double> values) {
  SampleStats stats;
  stats.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return stats;
  stats.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() < 2) return stats;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dev = values[i] - stats.mean;
    sq[i] = dev * dev;
  }
  const double var =
      pairwise_sum(sq) / static_cast<double>(values.size() - 1);
  stats.std_error = std::sqrt(var / static_cast<double>(values.size()));
  return stats;
}

}  // namespace csifb
