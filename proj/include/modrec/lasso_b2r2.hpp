#pragma once

// Baseline reconstruction: estimate the first difference of the residual by
// ISTA on the LASSO problem
//     min 1/2 ||b - V^R zhat||^2 + gamma ||zhat||_1,
// then unfold by cumulative summation.

#include "modrec/prox.hpp"
#include "modrec/recon_result.hpp"
#include "modrec/signal_model.hpp"
#include "modrec/spectral_operators.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

namespace modrec {

struct IstaParams {
  /// Explicit l1 weight. When unset, gamma = gamma_fraction * gamma_max(b).
  std::optional<double> gamma;
  double gamma_fraction = 0.1;
  int max_iters = 150;
  /// Defaults to 1/N, the reciprocal of the largest eigenvalue of V^R^T V^R.
  std::optional<double> step_size;
  bool round_differences = true;
  std::size_t history_limit = 4096;
};

/// out[0] = x[0], out[n] = x[n] - x[n-1]  (x[-1] = 0)
inline RealVector first_difference(const RealVector& x) {
  RealVector out = x;
  for (Eigen::Index i = x.size() - 1; i >= 1; --i) out[i] -= x[i - 1];
  return out;
}

inline RealVector cumulative_sum(const RealVector& x) {
  RealVector out(x.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += x[i];
    out[i] = acc;
  }
  return out;
}

/// Smallest gamma for which zhat = 0 solves the LASSO problem.
inline double lasso_gamma_max(const RealVector& observed, const PartialDftOperator& op) {
  const RealVector back = op.adjoint_stacked(observed);
  return back.size() == 0 ? 0.0 : back.cwiseAbs().maxCoeff();
}

inline double lasso_objective(const RealVector& zhat, const RealVector& observed, const PartialDftOperator& op,
                              double gamma) {
  return 0.5 * (observed - op.apply_stacked(zhat)).squaredNorm() + gamma * zhat.lpNorm<1>();
}

struct IstaOutput {
  RealVector estimate;
  double gamma = 0.0;
  double step_size = 0.0;
  /// Objective of iterates 0..iterations (most recent history_limit kept).
  std::vector<IterationRecord> history;
};

/// Resolved step size; rejects steps above 1/N.
inline double ista_step_size(const IstaParams& params, Eigen::Index n_samples) {
  const double limit = 1.0 / static_cast<double>(n_samples);
  const double step = params.step_size.value_or(limit);
  detail::require(step > 0.0, "IstaParams: step size must be positive");
  if (step > limit) {
    throw ConfigError("IstaParams: step size " + std::to_string(step) + " exceeds 1/L = " + std::to_string(limit));
  }
  return step;
}

/// zhat <- soft(zhat - step V^R^T (V^R zhat - b), step gamma), from zhat = 0.
inline IstaOutput ista_solve(const RealVector& observed, const PartialDftOperator& op, const IstaParams& params) {
  detail::require_same_length(observed.size(), 2 * op.rows(), "ista_solve");
  detail::require(params.max_iters >= 1, "IstaParams: max_iters must be >= 1");
  const Eigen::Index n = op.n_samples();
  const double step = ista_step_size(params, n);
  const double gamma = params.gamma.value_or(params.gamma_fraction * lasso_gamma_max(observed, op));
  detail::require(gamma >= 0.0 && std::isfinite(gamma), "IstaParams: gamma must be finite and nonnegative");

  BoundedHistory<IterationRecord> history(params.history_limit);
  RealVector zhat = RealVector::Zero(n);
  for (int it = 0; it < params.max_iters; ++it) {
    const RealVector misfit = op.apply_stacked(zhat) - observed;
    history.push({it, 0.5 * misfit.squaredNorm() + gamma * zhat.lpNorm<1>()});
    const RealVector gradient = op.adjoint_stacked(misfit);
    zhat = soft_threshold(RealVector(zhat - step * gradient), step * gamma);
  }
  history.push({params.max_iters, lasso_objective(zhat, observed, op, gamma)});
  if (!zhat.allFinite()) throw NumericalError("ista_solve: non-finite iterate");
  return {std::move(zhat), gamma, step, history.to_vector()};
}

/// Observation vector for the baseline: stacked masked spectrum of the first
/// difference of the folded samples.
inline RealVector lasso_observation(const FoldedSamples& folded, const PartialDftOperator& op) {
  return op.apply_stacked(first_difference(folded.samples));
}

inline ReconResult reconstruct_lasso_b2r2(const FoldedSamples& folded, const FrequencyMask& mask,
                                          const IstaParams& params = {}) {
  detail::require_same_length(folded.samples.size(), mask.n_samples(), "reconstruct_lasso_b2r2");
  detail::require(folded.lambda > 0.0, "reconstruct_lasso_b2r2: lambda must be positive");
  const auto start = std::chrono::steady_clock::now();

  const PartialDftOperator op(mask);
  IstaOutput solved = ista_solve(lasso_observation(folded, op), op, params);
  const RealVector differences =
      params.round_differences ? round_to_grid(solved.estimate, folded.lambda) : solved.estimate;

  ReconResult result;
  result.residual = cumulative_sum(differences);
  result.signal_estimate = folded.samples - result.residual;
  result.solver_output = std::move(solved.estimate);
  result.diagnostics = std::move(solved.history);
  result.iterations_run = params.max_iters;
  result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace modrec
