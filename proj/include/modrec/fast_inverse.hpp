#pragma once

// O(N log N) solve with A = rho (D^T D + I) + V^R^T V^R.
//
// D is the circular first difference, so D^T D = F^H diag(4 sin^2(pi k/N)) F
// for the unitary DFT F. With the unnormalized V used here,
// V^R^T V^R = Re(V^H V) = F^H Lambda_V F where Lambda_V averages the mask
// indicator over k and (-k) mod N and carries a factor N.

#include "modrec/fft.hpp"
#include "modrec/spectral_operators.hpp"
#include "modrec/types.hpp"

#include <cmath>
#include <numbers>

namespace modrec {

/// 4 sin^2(pi k / N), k = 0..N-1
inline RealVector eigenvalues_DtD(Eigen::Index n_samples) {
  detail::require(n_samples >= 2, "eigenvalues_DtD: n_samples must be >= 2");
  RealVector out(n_samples);
  const double n = static_cast<double>(n_samples);
  for (Eigen::Index k = 0; k < n_samples; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k) / n);
    out[k] = 4.0 * s * s;
  }
  return out;
}

/// N (mask_k + mask_{(-k) mod N}) / 2
inline RealVector mask_spectrum(const FrequencyMask& mask) {
  const Eigen::Index n = mask.n_samples();
  const RealVector indicator = mask.indicator();
  RealVector out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out[k] = 0.5 * static_cast<double>(n) * (indicator[k] + indicator[(n - k) % n]);
  }
  return out;
}

/// Eigenvalues of A for one (N, mask, rho). Immutable and shareable across
/// threads; each solve allocates its own scratch.
class DiagonalizedSystem {
 public:
  DiagonalizedSystem(const FrequencyMask& mask, double rho)
      : rho_(rho), lambda_d_(eigenvalues_DtD(mask.n_samples())), lambda_v_(mask_spectrum(mask)) {
    detail::require(rho > 0.0 && std::isfinite(rho), "DiagonalizedSystem: rho must be positive");
    lambda_a_ = rho_ * (lambda_d_.array() + 1.0).matrix() + lambda_v_;
  }

  [[nodiscard]] Eigen::Index n_samples() const { return lambda_a_.size(); }
  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] const RealVector& lambda_d() const { return lambda_d_; }
  [[nodiscard]] const RealVector& lambda_v() const { return lambda_v_; }
  [[nodiscard]] const RealVector& lambda_a() const { return lambda_a_; }

  /// FFT, divide by Lambda_A, inverse FFT. The imaginary part is round-off
  /// and is returned for inspection.
  [[nodiscard]] ComplexVector solve_complex(const RealVector& rhs) const {
    detail::require_same_length(rhs.size(), n_samples(), "DiagonalizedSystem::solve");
    if (!rhs.allFinite()) throw NumericalError("DiagonalizedSystem::solve: non-finite right-hand side");
    ComplexVector spectrum = fft::forward(rhs);
    spectrum.array() /= lambda_a_.array().cast<std::complex<double>>();
    return fft::inverse(spectrum);
  }

  /// x with A x = rhs. Lambda_A is symmetric in k, so half-spectrum real
  /// transforms suffice.
  [[nodiscard]] RealVector solve(const RealVector& rhs) const {
    detail::require_same_length(rhs.size(), n_samples(), "DiagonalizedSystem::solve");
    if (!rhs.allFinite()) throw NumericalError("DiagonalizedSystem::solve: non-finite right-hand side");
    ComplexVector half = fft::forward_half(rhs);
    half.array() /= lambda_a_.head(half.size()).array().cast<std::complex<double>>();
    return fft::inverse_half(half, n_samples());
  }

 private:
  double rho_;
  RealVector lambda_d_;
  RealVector lambda_v_;
  RealVector lambda_a_;
};

inline RealVector solve_A(const RealVector& rhs, const DiagonalizedSystem& system) { return system.solve(rhs); }

}  // namespace modrec
