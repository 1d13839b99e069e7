#pragma once

// Oracle-equivalence checks: every fast path against its dense counterpart.
// Used by `modrec selftest` and by the acceptance binary.

#include "modrec/fast_inverse.hpp"
#include "modrec/fsr_admm.hpp"
#include "modrec/signal_model.hpp"
#include "modrec/spectral_operators.hpp"
#include "modrec/testing/dense_reference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace modrec::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double elapsed_ms = 0.0;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline RealVector normal_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  RealVector out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

template <typename F>
CheckResult timed(std::string name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r = body();
  r.name = std::move(name);
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace detail

/// solve_A against a dense LU solve of rho (D^T D + I) + V^R^T V^R.
inline CheckResult fast_inverse_vs_dense(const std::vector<Eigen::Index>& sizes, const std::vector<double>& ofs,
                                         double rho = 2.0, int rhs_count = 20, double tol = 1e-10) {
  return detail::timed("fast inverse vs dense solve", [&] {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (Eigen::Index n : sizes) {
      for (double of : ofs) {
        const auto mask = out_of_band_indices(n, of);
        const DiagonalizedSystem system(mask, rho);
        const auto lu = testing::dense_A(mask, rho).partialPivLu();
        for (int i = 0; i < rhs_count; ++i) {
          const RealVector rhs = detail::normal_vector(n, rng);
          const RealVector dense = lu.solve(rhs);
          worst = std::max(worst, (solve_A(rhs, system) - dense).norm() / dense.norm());
        }
      }
    }
    return CheckResult{{}, worst <= tol, "max relative error " + detail::sci(worst)};
  });
}

/// <V x, c> = <x, V^H c> in the real inner product, random sizes and OF.
inline CheckResult adjoint_consistency(int trials = 50, double tol = 1e-10) {
  return detail::timed("adjoint consistency", [&] {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> size(8, 256);
    std::uniform_real_distribution<double> of_dist(1.2, 6.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto mask = out_of_band_indices(size(rng), of_dist(rng));
      const PartialDftOperator op(mask);
      const RealVector x = detail::normal_vector(mask.n_samples(), rng);
      ComplexVector c(mask.size());
      c.real() = detail::normal_vector(mask.size(), rng);
      c.imag() = detail::normal_vector(mask.size(), rng);
      const double lhs = (op.apply(x).conjugate().array() * c.array()).sum().real();
      const double rhs = x.dot(op.adjoint_real(c));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return CheckResult{{}, worst <= tol, "max relative mismatch " + detail::sci(worst)};
  });
}

/// Dense V^R^T V^R against dense Re(V^H V), entry-wise.
inline CheckResult gram_identity(Eigen::Index n = 32, double of = 2.0, double tol = 1e-12) {
  return detail::timed("Gram identity", [&] {
    const auto mask = out_of_band_indices(n, of);
    const testing::RealMatrix vr = testing::dense_VR(mask);
    const testing::ComplexMatrix v = testing::dense_V(mask);
    const double err = (vr.transpose() * vr - (v.adjoint() * v).real()).cwiseAbs().maxCoeff();
    return CheckResult{{}, err <= tol, "N=" + std::to_string(n) + " max entry error " + detail::sci(err)};
  });
}

/// Sorted eigenvalues of the dense circular D^T D against 4 sin^2(pi k / N).
inline CheckResult difference_eigenvalues(Eigen::Index n = 32, double tol = 1e-10) {
  return detail::timed("D^T D eigenvalues", [&] {
    const testing::RealMatrix d = testing::dense_D(n);
    const RealVector dense = Eigen::SelfAdjointEigenSolver<testing::RealMatrix>(d.transpose() * d).eigenvalues();
    RealVector closed(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
      closed[k] = 4.0 * s * s;
    }
    std::sort(closed.begin(), closed.end());
    const double err = (dense - closed).cwiseAbs().maxCoeff();
    return CheckResult{{}, err <= tol, "N=" + std::to_string(n) + " max error " + detail::sci(err)};
  });
}

/// Range, 2 lambda periodicity and residual quantization of the fold.
inline CheckResult folding_invariants(int count = 10000, double tol = 1e-9) {
  return detail::timed("folding invariants", [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> value(-20.0, 20.0);
    std::uniform_real_distribution<double> width(0.01, 3.0);
    std::uniform_int_distribution<int> shift(-50, 50);
    int failures = 0;
    for (int i = 0; i < count; ++i) {
      const double lambda = width(rng);
      const double x = value(rng);
      const double folded = fold_value(x, lambda);
      const bool in_range = -lambda <= folded && folded < lambda;

      const double shifted = fold_value(x + 2.0 * lambda * shift(rng), lambda);
      const double gap = std::abs(shifted - folded);
      const bool periodic = std::min(gap, 2.0 * lambda - gap) <= tol;

      const double q = (folded - x) / (2.0 * lambda);
      const bool quantized = std::abs(q - std::round(q)) <= tol;
      if (!(in_range && periodic && quantized)) ++failures;
    }
    return CheckResult{{}, failures == 0, std::to_string(count) + " draws, " + std::to_string(failures) + " failures"};
  });
}

/// ADMM on an N = 16 instance with a unique minimizer: residuals after
/// `iterations` and distance to a dense primal-dual reference solution.
inline CheckResult admm_vs_dense(int iterations = 500, double residual_tol = 1e-8, double distance_tol = 1e-6) {
  return detail::timed("ADMM vs dense minimizer (N=16)", [&] {
    const auto mask = out_of_band_indices(16, 4.0);
    RealVector z_true = RealVector::Zero(16);
    z_true.segment(3, 3).setConstant(0.5);
    z_true.segment(10, 2).setConstant(-0.5);
    const RealVector observed = PartialDftOperator(mask).apply_stacked(z_true);

    const FsrParams params{};
    const FsrProblem problem(mask, observed, params.rho);
    AdmmState state = AdmmState::start_from(gaussian_vector(16, 11));
    for (int i = 0; i < iterations; ++i) state = admm_step(std::move(state), problem, params);
    const auto& last = state.diagnostics.back();

    const RealVector reference =
        testing::dense_fsr_minimizer(testing::dense_VR(mask), observed, params.gamma1, params.gamma2, 100000);
    const double distance = (state.z - reference).norm();
    const bool ok = last.primal_residual <= residual_tol && last.dual_residual <= residual_tol && distance <= distance_tol;
    return CheckResult{{}, ok,
                       "primal " + detail::sci(last.primal_residual) + ", dual " + detail::sci(last.dual_residual) +
                           ", distance " + detail::sci(distance)};
  });
}

inline std::vector<CheckResult> run_all() {
  return {fast_inverse_vs_dense({16, 64}, {2.0, 4.0}),
          adjoint_consistency(),
          gram_identity(),
          difference_eigenvalues(),
          folding_invariants(),
          admm_vs_dense()};
}

}  // namespace modrec::selftest
