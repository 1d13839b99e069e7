#include "catch_amalgamated.hpp"

#include "modrec/fsr_admm.hpp"
#include "modrec/lasso_b2r2.hpp"
#include "modrec/testing/dense_reference.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace modrec;
using testing::RealMatrix;

namespace {

RealVector vec(std::initializer_list<double> values) {
  RealVector out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

RealVector random_real(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealVector out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

// Sparse, piecewise-constant residual observed through V^R at N = 16, OF = 4.
// Chosen so the FSR minimizer is unique.
struct SmallInstance {
  FrequencyMask mask = out_of_band_indices(16, 4.0);
  RealVector z_true;
  RealVector observed;

  SmallInstance() {
    z_true = RealVector::Zero(16);
    z_true.segment(3, 3).setConstant(0.5);
    z_true.segment(10, 2).setConstant(-0.5);
    observed = PartialDftOperator(mask).apply_stacked(z_true);
  }
};

double scalar_prox_by_search(double v, double weight) {
  // argmin_u 1/2 (u - v)^2 + weight |u|: compare the stationary point of each
  // smooth piece that lies inside its piece, plus the kink at 0.
  const auto cost = [&](double u) { return 0.5 * (u - v) * (u - v) + weight * std::abs(u); };
  double best = 0.0;
  for (double candidate : {v - weight, v + weight}) {
    const bool inside = (candidate == v - weight && candidate > 0.0) || (candidate == v + weight && candidate < 0.0);
    if (inside && cost(candidate) < cost(best)) best = candidate;
  }
  return best;
}

}  // namespace

TEST_CASE("circular difference and its adjoint", "[fsr]") {
  CHECK(circular_difference(RealVector::Constant(6, 2.5)).isZero());
  CHECK(circular_difference(vec({1, 2, 3})) == vec({1, 1, -2}));

  const RealMatrix d = testing::dense_D(9);
  const RealVector x = random_real(9, 1);
  CHECK((circular_difference(x) - d * x).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((circular_difference_adjoint(x) - d.transpose() * x).cwiseAbs().maxCoeff() <= 1e-14);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RealVector a = random_real(17, seed);
    const RealVector w = random_real(17, seed + 50);
    CHECK_THAT(circular_difference(a).dot(w), WithinAbs(a.dot(circular_difference_adjoint(w)), 1e-12));
  }
}

TEST_CASE("soft_threshold examples", "[fsr]") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  const RealVector x = random_real(10, 2);
  CHECK(soft_threshold(x, 0.0) == x);
  CHECK_THROWS_AS(soft_threshold(x, -0.1), ConfigError);
}

TEST_CASE("round_to_grid examples", "[fsr]") {
  CHECK(round_to_grid(0.49, 0.25) == 0.5);
  CHECK(round_to_grid(0.2, 0.25) == 0.0);
  CHECK(round_to_grid(-0.45, 0.25) == -0.5);
  for (double v : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) CHECK(round_to_grid(v, 0.25) == v);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double lambda = 0.1 + 0.05 * (i % 10);
    const double z = value(rng);
    const double snapped = round_to_grid(z, lambda);
    // snapped is the double nearest to an integer multiple of 2 lambda; when
    // 2 lambda is a power of two the quotient is an exact integer.
    const double q = std::round(snapped / (2.0 * lambda));
    REQUIRE(snapped == q * (2.0 * lambda));
    REQUIRE(std::abs(snapped / (2.0 * lambda) - q) <= 1e-12 * std::max(1.0, std::abs(q)));
    const double snapped_pow2 = round_to_grid(z, 0.25);
    REQUIRE(snapped_pow2 / 0.5 == std::round(snapped_pow2 / 0.5));
    REQUIRE(std::abs(snapped - z) <= lambda + 1e-12);
  }
}

TEST_CASE("fsr_objective matches dense evaluation", "[fsr]") {
  const auto mask = out_of_band_indices(32, 3.0);
  const PartialDftOperator op(mask);
  const FsrParams params{.gamma1 = 0.7, .gamma2 = 0.05};
  CHECK(fsr_objective(RealVector::Zero(32), RealVector::Zero(2 * op.rows()), op, params) == 0.0);

  const RealVector b = random_real(2 * op.rows(), 8);
  CHECK_THAT(fsr_objective(RealVector::Zero(32), b, op, params), WithinRel(0.5 * b.squaredNorm(), 1e-14));

  const RealVector z = random_real(32, 9);
  const double dense = testing::dense_fsr_objective(testing::dense_VR(mask), b, 0.7, 0.05, z);
  CHECK_THAT(fsr_objective(z, b, op, params), WithinRel(dense, 1e-10));
}

TEST_CASE("z-update equals the dense closed form", "[fsr]") {
  for (Eigen::Index n : {16, 40, 64}) {
    const auto mask = out_of_band_indices(n, 2.5);
    const double rho = 2.0;
    const FsrProblem problem(mask, random_real(2 * mask.size(), n), rho);
    AdmmState state = AdmmState::start_from(random_real(n, 3));
    state.u1 = random_real(n, 4);
    state.u2 = random_real(n, 5);
    state.y1 = random_real(n, 6);
    state.y2 = random_real(n, 7);

    const RealMatrix d = testing::dense_D(n);
    const RealMatrix vr = testing::dense_VR(mask);
    const RealVector rhs = rho * d.transpose() * (state.u1 - state.y1) + rho * (state.u2 - state.y2) +
                           vr.transpose() * problem.observed;
    const RealVector dense = testing::dense_A(mask, rho).partialPivLu().solve(rhs);

    const AdmmState next = admm_step(state, problem, FsrParams{.rho = rho});
    CHECK((next.z - dense).norm() <= 1e-9 * dense.norm());
  }
}

TEST_CASE("u-update decouples into two soft-thresholds", "[fsr]") {
  const Eigen::Index n = 24;
  const auto mask = out_of_band_indices(n, 2.0);
  const FsrParams params{.gamma1 = 1.3, .gamma2 = 0.4, .rho = 2.0};
  const FsrProblem problem(mask, random_real(2 * mask.size(), 1), params.rho);
  AdmmState state = AdmmState::start_from(random_real(n, 2));
  state.y1 = random_real(n, 3);
  state.y2 = random_real(n, 4);
  const AdmmState next = admm_step(state, problem, params);

  // Joint prox of g/rho over the stacked argument, coordinate by coordinate.
  RealVector joint_arg(2 * n);
  joint_arg.head(n) = circular_difference(next.z) + state.y1;
  joint_arg.tail(n) = next.z + state.y2;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double weight = (i < n ? params.gamma1 : params.gamma2) / params.rho;
    const double expected = scalar_prox_by_search(joint_arg[i], weight);
    const double got = i < n ? next.u1[i] : next.u2[i - n];
    REQUIRE_THAT(got, WithinAbs(expected, 1e-9));
  }
}

TEST_CASE("admm_step keeps the zero state for zero data", "[fsr]") {
  const auto mask = out_of_band_indices(32, 2.0);
  const FsrProblem problem(mask, RealVector::Zero(2 * mask.size()), 2.0);
  AdmmState state = AdmmState::start_from(RealVector::Zero(32));
  for (int i = 0; i < 5; ++i) state = admm_step(std::move(state), problem, {});
  CHECK(state.z.isZero());
  CHECK(state.u1.isZero());
  CHECK(state.y2.isZero());
  CHECK(state.iteration == 5);
}

TEST_CASE("ADMM converges to the dense reference minimizer at N=16", "[fsr]") {
  const SmallInstance inst;
  const FsrParams params{};
  const FsrProblem problem(inst.mask, inst.observed, params.rho);
  AdmmState state = AdmmState::start_from(gaussian_vector(16, 11));
  for (int i = 0; i < 500; ++i) state = admm_step(std::move(state), problem, params);
  CHECK(state.diagnostics.back().primal_residual <= 1e-8);
  CHECK(state.diagnostics.back().dual_residual <= 1e-8);

  const RealVector reference =
      testing::dense_fsr_minimizer(testing::dense_VR(inst.mask), inst.observed, params.gamma1, params.gamma2, 100000);
  CHECK((state.z - reference).norm() <= 1e-6);

  // A converged point is a fixed point of the iteration.
  for (int i = 0; i < 1500; ++i) state = admm_step(std::move(state), problem, params);
  const AdmmState again = admm_step(state, problem, params);
  CHECK((again.z - state.z).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((again.u1 - state.u1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((again.u2 - state.u2).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((again.y1 - state.y1).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((again.y2 - state.y2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("non-finite state is a hard error", "[fsr]") {
  const auto mask = out_of_band_indices(16, 2.0);
  const FsrProblem problem(mask, RealVector::Zero(2 * mask.size()), 2.0);
  AdmmState state = AdmmState::start_from(RealVector::Zero(16));
  state.y1[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(admm_step(state, problem, {}), NumericalError);
  CHECK_THROWS_AS(FsrParams{.gamma1 = 0.0}.validate(), ConfigError);
  CHECK_THROWS_AS(FsrParams{.rho = -1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(FsrParams{.max_iters = 0}.validate(), ConfigError);
}

TEST_CASE("reconstruct_fsr is exact when nothing folds", "[fsr]") {
  const RealVector f = 0.2 * generate_test_signal(2, 256, 4.0).samples;
  const auto folded = modulo_fold(f, 0.25);
  const auto result = reconstruct_fsr(folded, out_of_band_indices(256, 4.0));
  CHECK(result.residual.isZero());
  CHECK(result.signal_estimate == f);
  CHECK(result.iterations_run == 150);
  CHECK(result.diagnostics.size() == 150);
}

TEST_CASE("early stopping and bounded diagnostics", "[fsr]") {
  const auto sig = generate_test_signal(3, 128, 4.0);
  const auto folded = modulo_fold(sig.samples, 0.25);
  const auto mask = out_of_band_indices(128, 4.0);
  const auto stopped = reconstruct_fsr(folded, mask, {.max_iters = 5000, .tolerance = 1e-6});
  CHECK(stopped.iterations_run < 5000);
  const auto& last = stopped.diagnostics.back();
  CHECK(last.primal_residual <= 1e-6 * std::sqrt(128.0));
  CHECK(last.dual_residual <= 1e-6 * std::sqrt(128.0));

  const auto capped = reconstruct_fsr(folded, mask, {.max_iters = 40, .history_limit = 10});
  REQUIRE(capped.diagnostics.size() == 10);
  CHECK(capped.diagnostics.front().iteration == 31);
  CHECK(capped.diagnostics.back().iteration == 40);
}

TEST_CASE("reconstruct_fsr at full size (N=1024, OF=6), noiseless", "[fsr][slow]") {
  const auto mask = out_of_band_indices(1024, 6.0);
  std::vector<double> errors;
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto sig = generate_test_signal(500 + seed, 1024, 6.0);
    const auto folded = modulo_fold(sig.samples, 0.25);
    const auto result = reconstruct_fsr(folded, mask, {.init_seed = seed});
    errors.push_back(nmse(sig.samples, result.signal_estimate));
    if ((result.residual - residual(folded, sig).values).cwiseAbs().maxCoeff() <= 1e-9) ++exact;

    // Regression level observed at I = 150 with z0 ~ N(0, 1).
    CHECK(result.diagnostics.back().primal_residual <= 1e-2 * result.solver_output.norm());
  }
  std::sort(errors.begin(), errors.end());
  CHECK(errors[12] <= 1e-6);
  CHECK(exact >= 20);
}

// The 1e-3 relative bound is reached only after a few hundred iterations with
// these parameters: the ratio at I = 150 sits between 1e-3 and 1e-2.
TEST_CASE("primal residual at I=150 below 1e-3 of ||z||", "[fsr][slow][!shouldfail]") {
  const auto mask = out_of_band_indices(1024, 6.0);
  const FsrSolver solver(mask, {});
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto sig = generate_test_signal(500 + seed, 1024, 6.0);
    const auto result = solver.reconstruct(modulo_fold(sig.samples, 0.25), seed);
    CHECK(result.diagnostics.back().primal_residual <= 1e-3 * result.solver_output.norm());
  }
}

TEST_CASE("primal residual drops below 1e-3 of ||z|| with more iterations", "[fsr][slow]") {
  const auto mask = out_of_band_indices(1024, 6.0);
  const FsrSolver solver(mask, {.max_iters = 800});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto sig = generate_test_signal(500 + seed, 1024, 6.0);
    const auto result = solver.reconstruct(modulo_fold(sig.samples, 0.25), seed);
    CHECK(result.diagnostics.back().primal_residual <= 1e-3 * result.solver_output.norm());
  }
}

TEST_CASE("a perturbed residual entry only affects its own sample", "[fsr]") {
  const auto sig = generate_test_signal(8, 512, 6.0);
  const auto folded = modulo_fold(sig.samples, 0.25);
  const auto result = reconstruct_fsr(folded, out_of_band_indices(512, 6.0));
  RealVector z = result.solver_output;
  z[200] += 0.5;
  const RealVector f_est = folded.samples - round_to_grid(z, folded.lambda);
  const RealVector delta = f_est - result.signal_estimate;
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    if (i == 200) {
      CHECK(std::abs(delta[i]) > 0.0);
    } else {
      REQUIRE(delta[i] == 0.0);
    }
  }
}

TEST_CASE("FSR beats the LASSO baseline at OF=6, SNR=20 dB", "[fsr][slow]") {
  const auto mask = out_of_band_indices(1024, 6.0);
  double fsr_total = 0.0;
  double lasso_total = 0.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto sig = generate_test_signal(700 + seed, 1024, 6.0);
    auto folded = modulo_fold(sig.samples, 0.25);
    folded.samples = add_awgn(folded.samples, 20.0, mean_power(sig.samples), 9000 + seed);
    folded.noisy = true;
    fsr_total += nmse(sig.samples, reconstruct_fsr(folded, mask, {.init_seed = seed}).signal_estimate);
    lasso_total += nmse(sig.samples, reconstruct_lasso_b2r2(folded, mask).signal_estimate);
  }
  CHECK(fsr_total <= lasso_total);
}
