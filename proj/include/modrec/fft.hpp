#pragma once

// Thin wrapper over Eigen's FFT module. Forward transforms are unnormalized,
// inverse transforms carry the 1/N factor.

#include "modrec/types.hpp"

#include <unsupported/Eigen/FFT>

namespace modrec::fft {

namespace detail {
// Eigen::FFT caches twiddle tables per length inside the object, so each
// thread keeps its own instance.
inline Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> instance;
  return instance;
}

inline Eigen::FFT<double>& half_engine() {
  thread_local Eigen::FFT<double> instance(Eigen::FFT<double>::impl_type(), Eigen::FFT<double>::HalfSpectrum);
  return instance;
}
}  // namespace detail

inline ComplexVector forward(const ComplexVector& x) {
  ComplexVector out(x.size());
  detail::engine().fwd(out, x);
  return out;
}

inline ComplexVector forward(const RealVector& x) { return forward(ComplexVector(x.cast<std::complex<double>>())); }

inline ComplexVector inverse(const ComplexVector& x) {
  ComplexVector out(x.size());
  detail::engine().inv(out, x);
  return out;
}

/// Bins 0..N/2 of the forward transform of a real signal.
inline ComplexVector forward_half(const RealVector& x) {
  ComplexVector out(x.size() / 2 + 1);
  detail::half_engine().fwd(out.data(), x.data(), x.size());
  return out;
}

/// Real signal of length n from bins 0..n/2 of a Hermitian spectrum.
inline RealVector inverse_half(const ComplexVector& half, Eigen::Index n) {
  RealVector out(n);
  detail::half_engine().inv(out.data(), half.data(), n);
  return out;
}

}  // namespace modrec::fft
