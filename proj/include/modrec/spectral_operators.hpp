#pragma once

// Out-of-band frequency mask and the matrix-free partial DFT operator
// V (rows k in K of the unnormalized DFT, v_{k,n} = exp(-j 2 pi k n / N)).

#include "modrec/fft.hpp"
#include "modrec/signal_model.hpp"
#include "modrec/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace modrec {

/// Contiguous set of DFT bins {k_min, ..., k_max}. An empty mask has
/// k_min > k_max.
class FrequencyMask {
 public:
  /// Arbitrary contiguous range. Used for synthetic masks in tests; the
  /// out-of-band mask comes from out_of_band_indices().
  static FrequencyMask from_range(Eigen::Index n_samples, Eigen::Index k_min, Eigen::Index k_max,
                                  double oversampling_factor = std::numeric_limits<double>::quiet_NaN()) {
    detail::require(n_samples >= 1, "FrequencyMask: n_samples must be positive");
    if (k_min <= k_max) {
      detail::require(k_min >= 0 && k_max < n_samples, "FrequencyMask: bin range outside [0, N)");
    }
    return FrequencyMask(n_samples, oversampling_factor, k_min, k_max);
  }

  static FrequencyMask empty(Eigen::Index n_samples) { return from_range(n_samples, 1, 0); }

  [[nodiscard]] Eigen::Index n_samples() const { return n_; }
  [[nodiscard]] double oversampling_factor() const { return of_; }
  [[nodiscard]] Eigen::Index k_min() const { return k_min_; }
  [[nodiscard]] Eigen::Index k_max() const { return k_max_; }
  [[nodiscard]] Eigen::Index size() const { return k_max_ >= k_min_ ? k_max_ - k_min_ + 1 : 0; }
  [[nodiscard]] bool empty() const { return size() == 0; }
  [[nodiscard]] bool contains(Eigen::Index k) const { return k >= k_min_ && k <= k_max_; }

  [[nodiscard]] std::vector<Eigen::Index> indices() const {
    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index k = k_min_; k <= k_max_; ++k) out.push_back(k);
    return out;
  }

  /// k in K  <=>  (N - k) mod N in K
  [[nodiscard]] bool is_reversal_symmetric() const {
    if (empty()) return true;
    return !contains(0) && k_min_ + k_max_ == n_;
  }

  /// 0/1 indicator over all N bins.
  [[nodiscard]] RealVector indicator() const {
    RealVector out = RealVector::Zero(n_);
    if (!empty()) out.segment(k_min_, size()).setOnes();
    return out;
  }

 private:
  FrequencyMask(Eigen::Index n, double of, Eigen::Index k_min, Eigen::Index k_max)
      : n_(n), of_(of), k_min_(k_min), k_max_(k_max) {}

  Eigen::Index n_;
  double of_;
  Eigen::Index k_min_;
  Eigen::Index k_max_;
};

/// Bins with pi/OF < 2 pi k / N < 2 pi - pi/OF, i.e. N/(2 OF) < k < N - N/(2 OF).
/// Throws ConfigError when the set is empty.
inline FrequencyMask out_of_band_indices(Eigen::Index n_samples, double oversampling_factor) {
  detail::require(n_samples >= 4, "out_of_band_indices: n_samples must be >= 4");
  detail::require(oversampling_factor > 1.0, "out_of_band_indices: oversampling factor must exceed 1");
  const double n = static_cast<double>(n_samples);
  const double cutoff = n / (2.0 * oversampling_factor);
  const auto k_min = static_cast<Eigen::Index>(std::floor(cutoff)) + 1;
  const auto k_max = static_cast<Eigen::Index>(std::ceil(n - cutoff)) - 1;
  if (k_min > k_max) {
    throw ConfigError("out_of_band_indices: empty mask for N=" + std::to_string(n_samples) +
                      ", OF=" + std::to_string(oversampling_factor) + " (reconstruction impossible)");
  }
  return FrequencyMask::from_range(n_samples, k_min, k_max, oversampling_factor);
}

/// [Re c; Im c]
inline RealVector real_stack(const ComplexVector& c) {
  RealVector out(2 * c.size());
  out.head(c.size()) = c.real();
  out.tail(c.size()) = c.imag();
  return out;
}

inline ComplexVector real_unstack(const RealVector& stacked) {
  detail::require(stacked.size() % 2 == 0, "real_unstack: odd-length input");
  const Eigen::Index m = stacked.size() / 2;
  ComplexVector out(m);
  out.real() = stacked.head(m);
  out.imag() = stacked.tail(m);
  return out;
}

/// Matrix-free V and its real-stacked forms. Immutable; apply functions
/// allocate their own scratch and are safe to call concurrently.
class PartialDftOperator {
 public:
  explicit PartialDftOperator(FrequencyMask mask) : mask_(std::move(mask)) {}

  [[nodiscard]] const FrequencyMask& mask() const { return mask_; }
  [[nodiscard]] Eigen::Index n_samples() const { return mask_.n_samples(); }
  [[nodiscard]] Eigen::Index rows() const { return mask_.size(); }

  /// Full unnormalized DFT gathered on K, in increasing k.
  [[nodiscard]] ComplexVector apply(const RealVector& x) const {
    detail::require_same_length(x.size(), n_samples(), "PartialDftOperator::apply");
    if (mask_.empty()) return ComplexVector(0);
    return fft::forward(x).segment(mask_.k_min(), rows());
  }

  /// Re(V^H c), equal to V^R^T [Re c; Im c].
  [[nodiscard]] RealVector adjoint_real(const ComplexVector& c) const {
    detail::require_same_length(c.size(), rows(), "PartialDftOperator::adjoint_real");
    ComplexVector scattered = ComplexVector::Zero(n_samples());
    if (!mask_.empty()) scattered.segment(mask_.k_min(), rows()) = c;
    // inverse() carries 1/N; V^H has none.
    return static_cast<double>(n_samples()) * fft::inverse(scattered).real();
  }

  [[nodiscard]] RealVector apply_stacked(const RealVector& x) const { return real_stack(apply(x)); }

  [[nodiscard]] RealVector adjoint_stacked(const RealVector& stacked) const {
    detail::require_same_length(stacked.size(), 2 * rows(), "PartialDftOperator::adjoint_stacked");
    return adjoint_real(real_unstack(stacked));
  }

  /// V^R^T V^R x
  [[nodiscard]] RealVector gram(const RealVector& x) const { return adjoint_real(apply(x)); }

 private:
  FrequencyMask mask_;
};

inline ComplexVector apply_V(const RealVector& x, const FrequencyMask& mask) {
  return PartialDftOperator(mask).apply(x);
}

inline RealVector apply_V_adjoint_real(const ComplexVector& c, const FrequencyMask& mask) {
  return PartialDftOperator(mask).adjoint_real(c);
}

/// Masked spectrum of the folded samples. Equals V z on K when the original
/// is exactly bandlimited and the samples are noiseless.
inline ComplexVector folded_spectrum(const FoldedSamples& folded, const FrequencyMask& mask) {
  return apply_V(folded.samples, mask);
}

}  // namespace modrec
