#pragma once

// Test-signal generation, clipping, modulo folding, noise injection and
// reconstruction error metrics.

#include "modrec/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace modrec {

/// Peak-normalized sum of sinusoids sampled at a fixed period.
struct BandlimitedSignal {
  RealVector samples;
  double sample_period = 0.01;
  double oversampling_factor = 2.0;
  double peak_amplitude = 1.0;

  [[nodiscard]] Eigen::Index n_samples() const { return samples.size(); }
};

/// Output of the modulo ADC. Noiseless samples lie in [-lambda, lambda).
struct FoldedSamples {
  RealVector samples;
  double lambda = 0.25;
  bool noisy = false;

  [[nodiscard]] Eigen::Index n_samples() const { return samples.size(); }
};

/// z = f_lambda - f. Entries are multiples of 2*lambda when noiseless.
struct ResidualSignal {
  RealVector values;
};

struct ToneSpec {
  int num_tones = 5;
  bool on_grid = true;
  double sample_period = 0.01;
};

/// Largest DFT bin strictly below the cutoff N / (2 OF).
inline int highest_in_band_bin(Eigen::Index n_samples, double oversampling_factor) {
  const double cutoff = static_cast<double>(n_samples) / (2.0 * oversampling_factor);
  return static_cast<int>(std::ceil(cutoff)) - 1;
}

/// Superposes `num_tones` random sinusoids below the band limit and scales the
/// result so its peak magnitude is 1.
///
/// Amplitudes are uniform on (0, 1], phases uniform on [0, 2pi). In on-grid
/// mode every tone sits on an integer DFT bin in [1, N/(2 OF)) so the spectrum
/// is exactly zero on the out-of-band set. Off-grid frequencies are uniform on
/// [0, 1/(2 Ts OF)) Hz and leak into the out-of-band bins.
inline BandlimitedSignal generate_test_signal(std::uint64_t seed, Eigen::Index n_samples,
                                              double oversampling_factor, const ToneSpec& tones = {}) {
  detail::require(n_samples >= 8, "generate_test_signal: n_samples must be >= 8");
  detail::require(oversampling_factor > 1.0, "generate_test_signal: oversampling factor must exceed 1");
  detail::require(tones.num_tones >= 1, "generate_test_signal: num_tones must be >= 1");
  detail::require(tones.sample_period > 0.0, "generate_test_signal: sample period must be positive");

  const int top_bin = highest_in_band_bin(n_samples, oversampling_factor);
  if (tones.on_grid) {
    detail::require(top_bin >= 1, "generate_test_signal: no in-band DFT bin for N=" + std::to_string(n_samples) +
                                      ", OF=" + std::to_string(oversampling_factor));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> bin(1, std::max(top_bin, 1));

  const double n = static_cast<double>(n_samples);
  const double ts = tones.sample_period;
  const double max_hz = 1.0 / (2.0 * ts * oversampling_factor);

  RealVector samples = RealVector::Zero(n_samples);
  for (int t = 0; t < tones.num_tones; ++t) {
    const double amplitude = 1.0 - unit(rng);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    // radians per sample
    const double omega = tones.on_grid ? 2.0 * std::numbers::pi * bin(rng) / n
                                       : 2.0 * std::numbers::pi * (max_hz * unit(rng)) * ts;
    for (Eigen::Index i = 0; i < n_samples; ++i) {
      samples[i] += amplitude * std::sin(omega * static_cast<double>(i) + phase);
    }
  }

  const double peak = samples.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw NumericalError("generate_test_signal: tones cancelled to an all-zero signal");
  samples /= peak;

  return BandlimitedSignal{std::move(samples), ts, oversampling_factor, 1.0};
}

inline RealVector clip(const RealVector& signal, double lambda) {
  detail::require(lambda > 0.0, "clip: lambda must be positive");
  return signal.cwiseMax(-lambda).cwiseMin(lambda);
}

/// M(x) = ((x + lambda) mod 2 lambda) - lambda with a floored remainder.
inline double fold_value(double x, double lambda) {
  if (-lambda <= x && x < lambda) return x;
  const double period = 2.0 * lambda;
  double r = std::fmod(x + lambda, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r - lambda;
}

inline FoldedSamples modulo_fold(const RealVector& signal, double lambda) {
  detail::require(lambda > 0.0, "modulo_fold: lambda must be positive");
  RealVector out = signal.unaryExpr([lambda](double x) { return fold_value(x, lambda); });
  return FoldedSamples{std::move(out), lambda, false};
}

inline ResidualSignal residual(const FoldedSamples& folded, const RealVector& original) {
  detail::require_same_length(folded.samples.size(), original.size(), "residual");
  return ResidualSignal{folded.samples - original};
}

inline ResidualSignal residual(const FoldedSamples& folded, const BandlimitedSignal& original) {
  return residual(folded, original.samples);
}

inline double mean_power(const RealVector& x) {
  return x.size() == 0 ? 0.0 : x.squaredNorm() / static_cast<double>(x.size());
}

/// Standard-normal draws for a given seed; the noise shape is shared across
/// SNR levels that use the same seed.
inline RealVector gaussian_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

inline double noise_stddev(double snr_db, double reference_power) {
  return std::sqrt(reference_power * std::pow(10.0, -snr_db / 10.0));
}

/// Adds i.i.d. N(0, P 10^(-snr/10)) noise. snr_db = +inf returns the input.
inline RealVector add_awgn(const RealVector& samples, double snr_db, double reference_power, std::uint64_t seed) {
  detail::require(reference_power > 0.0, "add_awgn: reference power must be positive");
  detail::require(!std::isnan(snr_db) && snr_db != -std::numeric_limits<double>::infinity(),
                  "add_awgn: snr must be a number or +inf");
  if (std::isinf(snr_db)) return samples;
  return samples + noise_stddev(snr_db, reference_power) * gaussian_vector(samples.size(), seed);
}

/// ||f - f_est||^2 / ||f||^2
inline double nmse(const RealVector& original, const RealVector& estimate) {
  detail::require_same_length(original.size(), estimate.size(), "nmse");
  const double denom = original.squaredNorm();
  detail::require(denom > 0.0, "nmse: original signal has zero norm");
  return (original - estimate).squaredNorm() / denom;
}

inline double to_db(double ratio) {
  if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ratio);
}

inline double nmse_db(const RealVector& original, const RealVector& estimate) {
  return to_db(nmse(original, estimate));
}

}  // namespace modrec
