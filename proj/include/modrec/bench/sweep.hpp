#pragma once

// Seeded Monte-Carlo sweeps. Each (sweep point, trial) is one work unit: one
// signal, one noise draw, every enabled method run on the same folded input.

#include "modrec/bench/config.hpp"
#include "modrec/fsr_admm.hpp"
#include "modrec/lasso_b2r2.hpp"
#include "modrec/signal_model.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace modrec::bench {

struct TrialRecord {
  Method method = Method::fsr;
  double of = 0.0;
  double snr_db = kNoiseless;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double nmse = 0.0;
  double nmse_db = 0.0;
  double runtime_ms = 0.0;
  int iterations_run = 0;
  bool exact_recovery = false;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child stream `stream` of `parent`.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
  return splitmix64(parent ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// seed = base_seed + h(OF, trial). The sweep point enters only through its OF,
/// so every SNR point at the same OF sees the same signal and noise shape.
inline std::uint64_t trial_seed(std::uint64_t base_seed, double of, int trial_index) {
  const std::uint64_t point_key = std::bit_cast<std::uint64_t>(of);
  return base_seed + derive_seed(splitmix64(point_key), static_cast<std::uint64_t>(trial_index));
}

/// Worker count: MODREC_THREADS if set and positive, else the hardware default.
inline unsigned resolve_thread_count() {
  unsigned fallback = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("MODREC_THREADS");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError(std::string("MODREC_THREADS must be a nonnegative integer, got '") + env + "'");
  return v == 0 ? fallback : static_cast<unsigned>(v);
}

/// Signal, folded observation and ground-truth residual for one work unit.
struct TrialInput {
  RealVector original;
  FoldedSamples folded;
  RealVector true_residual; // what an exact reconstruction subtracts
};

inline TrialInput make_input(const ExperimentConfig& config, double of, double snr_db, std::uint64_t signal_seed,
                             std::uint64_t noise_seed) {
  const ToneSpec tones{config.num_tones, config.on_grid, config.sample_period};
  BandlimitedSignal sig = generate_test_signal(signal_seed, config.n_samples, of, tones);

  RealVector noise = RealVector::Zero(config.n_samples);
  if (!std::isinf(snr_db)) {
    noise = noise_stddev(snr_db, mean_power(sig.samples)) * gaussian_vector(config.n_samples, noise_seed);
  }

  TrialInput in;
  if (config.noise_position == NoisePosition::post_fold) {
    in.folded = modulo_fold(sig.samples, config.lambda);
    in.true_residual = in.folded.samples - sig.samples;
    in.folded.samples += noise;
  } else {
    const RealVector noisy = sig.samples + noise;
    in.folded = modulo_fold(noisy, config.lambda);
    in.true_residual = in.folded.samples - noisy;
  }
  in.folded.noisy = !std::isinf(snr_db);
  in.original = std::move(sig.samples);
  return in;
}

/// Signal and noise streams of one sweep trial.
inline TrialInput make_trial_input(const ExperimentConfig& config, double of, double snr_db, std::uint64_t seed) {
  return make_input(config, of, snr_db, derive_seed(seed, 1), derive_seed(seed, 2));
}

/// Immutable per-OF state shared by all trials at that OF.
struct PointContext {
  double of;
  double snr_db;
  FrequencyMask mask;
  std::shared_ptr<const FsrSolver> fsr;
};

inline TrialRecord run_method(const ExperimentConfig& config, const PointContext& point, const TrialInput& in,
                              Method method, int trial, std::uint64_t seed) {
  ReconResult result;
  if (method == Method::fsr) {
    const std::uint64_t init = derive_seed(derive_seed(seed, 3), config.fsr_params.init_seed);
    result = point.fsr->reconstruct(in.folded, init);
  } else {
    result = reconstruct_lasso_b2r2(in.folded, point.mask, config.ista_params);
  }

  TrialRecord r;
  r.method = method;
  r.of = point.of;
  r.snr_db = point.snr_db;
  r.trial_index = trial;
  r.seed = seed;
  r.nmse = nmse(in.original, result.signal_estimate);
  r.nmse_db = to_db(r.nmse);
  r.runtime_ms = result.elapsed_ms;
  r.iterations_run = result.iterations_run;
  r.exact_recovery = (result.residual - in.true_residual).cwiseAbs().maxCoeff() <= 1e-9;
  return r;
}

/// Records ordered by (sweep index, trial index, method order in config),
/// independent of the number of workers.
inline std::vector<TrialRecord> run_sweep(const ExperimentConfig& config, unsigned threads = 0) {
  config.validate();
  if (threads == 0) threads = resolve_thread_count();

  std::vector<PointContext> points;
  for (std::size_t p = 0; p < config.sweep.values.size(); ++p) {
    const double of = config.of_at(p);
    FrequencyMask mask = out_of_band_indices(config.n_samples, of);
    std::shared_ptr<const FsrSolver> fsr;
    // Points that share an OF share the solver.
    for (const auto& prev : points) {
      if (prev.of == of) fsr = prev.fsr;
    }
    if (!fsr) fsr = std::make_shared<const FsrSolver>(mask, config.fsr_params);
    points.push_back({of, config.snr_at(p), std::move(mask), std::move(fsr)});
  }

  const std::size_t n_methods = config.methods.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t n_units = points.size() * n_trials;
  std::vector<TrialRecord> records(n_units * n_methods);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto worker = [&] {
    while (!failed.load()) {
      const std::size_t unit = next.fetch_add(1);
      if (unit >= n_units) return;
      try {
        const PointContext& point = points[unit / n_trials];
        const int trial = static_cast<int>(unit % n_trials);
        const std::uint64_t seed = trial_seed(config.base_seed, point.of, trial);
        const TrialInput in = make_trial_input(config, point.of, point.snr_db, seed);
        for (std::size_t m = 0; m < n_methods; ++m) {
          records[unit * n_methods + m] = run_method(config, point, in, config.methods[m], trial, seed);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, n_units));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return records;
}

}  // namespace modrec::bench
