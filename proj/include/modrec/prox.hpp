#pragma once

#include "modrec/types.hpp"

#include <cmath>

namespace modrec {

/// prox of tau*|.|: sign(x) max(|x| - tau, 0)
inline double soft_threshold(double x, double tau) {
  const double shrunk = std::abs(x) - tau;
  return shrunk > 0.0 ? std::copysign(shrunk, x) : 0.0;
}

inline RealVector soft_threshold(const RealVector& x, double tau) {
  detail::require(tau >= 0.0, "soft_threshold: tau must be nonnegative");
  return x.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
}

/// ceil(floor(z / lambda) / 2) * 2 lambda: the nearest multiple of 2 lambda,
/// with z in [(2m-1) lambda, (2m+1) lambda) mapping to 2 m lambda.
inline double round_to_grid(double z, double lambda) {
  return std::ceil(std::floor(z / lambda) / 2.0) * 2.0 * lambda;
}

inline RealVector round_to_grid(const RealVector& z, double lambda) {
  detail::require(lambda > 0.0, "round_to_grid: lambda must be positive");
  return z.unaryExpr([lambda](double v) { return round_to_grid(v, lambda); });
}

}  // namespace modrec
