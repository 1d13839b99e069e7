#pragma once

// Fused sparse reconstruction: recover the residual z directly from
//     min 1/2 ||b - V^R z||^2 + gamma1 ||D z||_1 + gamma2 ||z||_1
// by ADMM on the splitting Phi z = u, Phi = [D; I], then snap z to the
// 2 lambda grid.

#include "modrec/fast_inverse.hpp"
#include "modrec/prox.hpp"
#include "modrec/recon_result.hpp"
#include "modrec/signal_model.hpp"
#include "modrec/spectral_operators.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>

namespace modrec {

struct FsrParams {
  double gamma1 = 1.0;  // weight on ||D z||_1
  double gamma2 = 0.01; // weight on ||z||_1
  double rho = 2.0;
  int max_iters = 150;
  std::uint64_t init_seed = 0;
  /// Stop early once both residuals drop below tolerance * sqrt(N).
  std::optional<double> tolerance;
  std::size_t history_limit = 4096;

  void validate() const {
    detail::require(gamma1 > 0.0 && std::isfinite(gamma1), "FsrParams: gamma1 must be positive");
    detail::require(gamma2 > 0.0 && std::isfinite(gamma2), "FsrParams: gamma2 must be positive");
    detail::require(rho > 0.0 && std::isfinite(rho), "FsrParams: rho must be positive");
    detail::require(max_iters >= 1, "FsrParams: max_iters must be >= 1");
    detail::require(!tolerance || *tolerance >= 0.0, "FsrParams: tolerance must be nonnegative");
  }
};

/// (D x)[i] = x[(i+1) mod N] - x[i]
inline RealVector circular_difference(const RealVector& x) {
  const Eigen::Index n = x.size();
  RealVector out(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) out[i] = x[i + 1] - x[i];
  if (n > 0) out[n - 1] = x[0] - x[n - 1];
  return out;
}

/// (D^T w)[j] = w[(j-1) mod N] - w[j]
inline RealVector circular_difference_adjoint(const RealVector& w) {
  const Eigen::Index n = w.size();
  RealVector out(n);
  if (n > 0) out[0] = w[n - 1] - w[0];
  for (Eigen::Index j = 1; j < n; ++j) out[j] = w[j - 1] - w[j];
  return out;
}

inline double fsr_objective(const RealVector& z, const RealVector& observed, const PartialDftOperator& op,
                            const FsrParams& params) {
  return 0.5 * (observed - op.apply_stacked(z)).squaredNorm() + params.gamma1 * circular_difference(z).lpNorm<1>() +
         params.gamma2 * z.lpNorm<1>();
}

/// Everything about one instance that stays fixed across iterations. The
/// diagonalized system depends only on (N, K, rho) and may be shared between
/// instances and threads.
struct FsrProblem {
  PartialDftOperator op;
  std::shared_ptr<const DiagonalizedSystem> system;
  RealVector observed;        // b = [Re F; Im F] on K
  RealVector back_projection; // V^R^T b

  FsrProblem(const FrequencyMask& mask, RealVector observed_stacked, double rho)
      : FsrProblem(mask, std::make_shared<const DiagonalizedSystem>(mask, rho), std::move(observed_stacked)) {}

  FsrProblem(const FrequencyMask& mask, std::shared_ptr<const DiagonalizedSystem> shared_system,
             RealVector observed_stacked)
      : op(mask), system(std::move(shared_system)), observed(std::move(observed_stacked)),
        back_projection(op.adjoint_stacked(observed)) {
    detail::require(system != nullptr, "FsrProblem: missing diagonalized system");
    detail::require_same_length(system->n_samples(), mask.n_samples(), "FsrProblem");
  }
};

struct AdmmState {
  RealVector z;
  RealVector u1, u2; // u1 ~ D z, u2 ~ z
  RealVector y1, y2; // scaled duals
  int iteration = 0;
  BoundedHistory<IterationRecord> diagnostics;

  /// z0 given, u0 = Phi z0, y0 = 0.
  static AdmmState start_from(RealVector z0, std::size_t history_limit = 4096) {
    AdmmState s;
    const Eigen::Index n = z0.size();
    s.u1 = circular_difference(z0);
    s.u2 = z0;
    s.y1 = RealVector::Zero(n);
    s.y2 = RealVector::Zero(n);
    s.z = std::move(z0);
    s.diagnostics = BoundedHistory<IterationRecord>(history_limit);
    return s;
  }
};

/// Right-hand side of the z-update: rho D^T (u1 - y1) + rho (u2 - y2) + V^R^T b.
inline RealVector z_update_rhs(const AdmmState& state, const FsrProblem& problem, double rho) {
  return rho * circular_difference_adjoint(state.u1 - state.y1) + rho * (state.u2 - state.y2) +
         problem.back_projection;
}

/// One ADMM iteration: z-update via the diagonalized solve, decoupled
/// soft-thresholds for u1 and u2, scaled dual ascent.
inline AdmmState admm_step(AdmmState state, const FsrProblem& problem, const FsrParams& params) {
  const double rho = params.rho;
  state.z = problem.system->solve(z_update_rhs(state, problem, rho));

  const RealVector dz = circular_difference(state.z);
  RealVector u1 = soft_threshold(RealVector(dz + state.y1), params.gamma1 / rho);
  RealVector u2 = soft_threshold(RealVector(state.z + state.y2), params.gamma2 / rho);

  IterationRecord record;
  record.iteration = state.iteration + 1;
  record.dual_residual = rho * (circular_difference_adjoint(u1 - state.u1) + (u2 - state.u2)).norm();

  state.u1 = std::move(u1);
  state.u2 = std::move(u2);
  const RealVector r1 = dz - state.u1;
  const RealVector r2 = state.z - state.u2;
  state.y1 += r1;
  state.y2 += r2;
  state.iteration += 1;

  record.primal_residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
  record.objective = fsr_objective(state.z, problem.observed, problem.op, params);
  if (!std::isfinite(record.objective) || !std::isfinite(record.primal_residual) ||
      !std::isfinite(record.dual_residual) || !state.y1.allFinite() || !state.y2.allFinite()) {
    throw NumericalError("admm_step: non-finite state at iteration " + std::to_string(state.iteration));
  }
  state.diagnostics.push(record);
  return state;
}

/// Runs admm_step until max_iters or the optional residual tolerance.
inline AdmmState run_admm(AdmmState state, const FsrProblem& problem, const FsrParams& params) {
  params.validate();
  const double stop = params.tolerance ? *params.tolerance * std::sqrt(static_cast<double>(state.z.size())) : -1.0;
  for (int it = 0; it < params.max_iters; ++it) {
    state = admm_step(std::move(state), problem, params);
    if (params.tolerance) {
      const auto& last = state.diagnostics.back();
      if (last.primal_residual <= stop && last.dual_residual <= stop) break;
    }
  }
  return state;
}

/// Reusable solver for one (N, K, params): Lambda_A is computed once and shared
/// by every reconstruct() call. Safe to use from several threads.
class FsrSolver {
 public:
  FsrSolver(const FrequencyMask& mask, FsrParams params)
      : mask_(mask), params_(std::move(params)),
        system_((params_.validate(), std::make_shared<const DiagonalizedSystem>(mask, params_.rho))) {}

  [[nodiscard]] const FsrParams& params() const { return params_; }
  [[nodiscard]] const DiagonalizedSystem& system() const { return *system_; }

  /// z0 ~ N(0, 1) from init_seed, ADMM, round to the 2 lambda grid,
  /// f_est = f_lambda - z.
  [[nodiscard]] ReconResult reconstruct(const FoldedSamples& folded, std::uint64_t init_seed) const {
    detail::require_same_length(folded.samples.size(), mask_.n_samples(), "reconstruct_fsr");
    detail::require(folded.lambda > 0.0, "reconstruct_fsr: lambda must be positive");
    const auto start = std::chrono::steady_clock::now();

    const FsrProblem problem(mask_, system_, real_stack(folded_spectrum(folded, mask_)));
    AdmmState state = AdmmState::start_from(gaussian_vector(mask_.n_samples(), init_seed), params_.history_limit);
    state = run_admm(std::move(state), problem, params_);

    ReconResult result;
    result.residual = round_to_grid(state.z, folded.lambda);
    result.signal_estimate = folded.samples - result.residual;
    result.solver_output = std::move(state.z);
    result.diagnostics = state.diagnostics.to_vector();
    result.iterations_run = state.iteration;
    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

  [[nodiscard]] ReconResult reconstruct(const FoldedSamples& folded) const {
    return reconstruct(folded, params_.init_seed);
  }

 private:
  FrequencyMask mask_;
  FsrParams params_;
  std::shared_ptr<const DiagonalizedSystem> system_;
};

inline ReconResult reconstruct_fsr(const FoldedSamples& folded, const FrequencyMask& mask,
                                   const FsrParams& params = {}) {
  return FsrSolver(mask, params).reconstruct(folded);
}

}  // namespace modrec
