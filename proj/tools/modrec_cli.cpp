// modrec: generate, fold and reconstruct modulo-sampled signals, run sweeps.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

#include "modrec/bench/config.hpp"
#include "modrec/bench/csv.hpp"
#include "modrec/bench/summary.hpp"
#include "modrec/bench/svg_plot.hpp"
#include "modrec/bench/sweep.hpp"
#include "modrec/fsr_admm.hpp"
#include "modrec/lasso_b2r2.hpp"
#include "modrec/selftest.hpp"
#include "modrec/signal_io.hpp"
#include "modrec/signal_model.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace modrec;
using namespace modrec::bench;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> of;
  std::optional<std::string> snr;
  std::vector<std::string> methods;
  std::string out;
  std::optional<std::string> plot;
  bool quiet = false;

  // gen / fold / recon
  std::optional<Eigen::Index> n_samples;
  std::optional<double> lambda;
  std::optional<int> tones;
  bool off_grid = false;
  std::string input;
  std::string reference;

  // sweep without a config file
  std::string sweep_var;
  std::vector<std::string> values;
};

void say(const Options& opt, const std::string& line) {
  if (!opt.quiet) std::cout << line << '\n';
}

std::string num(double v) { return io::format_double(v); }

void write_or_print(const std::string& path, const RealVector& samples) {
  if (path.empty() || path == "-") {
    io::write_signal_csv(std::cout, samples);
  } else {
    io::write_signal_csv(path, samples);
  }
}

int cmd_gen(const Options& opt) {
  const double of = opt.of.value_or(6.0);
  const Eigen::Index n = opt.n_samples.value_or(1024);
  const auto sig = generate_test_signal(opt.seed.value_or(0), n, of, ToneSpec{opt.tones.value_or(5), !opt.off_grid, 0.01});
  write_or_print(opt.out, sig.samples);
  if (!opt.out.empty() && opt.out != "-") say(opt, "wrote " + std::to_string(n) + " samples to " + opt.out);
  return 0;
}

int cmd_fold(const Options& opt) {
  if (opt.input.empty()) throw ConfigError("fold: --input <signal.csv> is required");
  const RealVector x = io::read_signal_csv(opt.input);
  const double lambda = opt.lambda.value_or(0.25);
  detail::require(lambda > 0.0, "fold: --lambda must be positive");
  const auto folded = modulo_fold(x, lambda);
  write_or_print(opt.out, folded.samples);
  if (!opt.out.empty() && opt.out != "-") say(opt, "wrote folded samples to " + opt.out);
  return 0;
}

ReconResult reconstruct(Method method, const FoldedSamples& folded, const FrequencyMask& mask, std::uint64_t seed) {
  if (method == Method::fsr) return reconstruct_fsr(folded, mask, FsrParams{.init_seed = seed});
  return reconstruct_lasso_b2r2(folded, mask);
}

int cmd_recon(const Options& opt) {
  const Method method = parse_method(opt.methods.empty() ? "fsr" : opt.methods.front());
  if (opt.methods.size() > 1) throw ConfigError("recon: exactly one --method");
  const double of = opt.of.value_or(6.0);
  const std::uint64_t seed = opt.seed.value_or(0);
  const double lambda = opt.lambda.value_or(0.25);
  detail::require(lambda > 0.0, "recon: --lambda must be positive");

  FoldedSamples folded;
  std::optional<RealVector> original;
  if (!opt.input.empty()) {
    if (opt.snr) throw ConfigError("recon: --snr applies to synthetic input only");
    folded = FoldedSamples{io::read_signal_csv(opt.input), lambda, false};
    const double peak = folded.samples.size() ? folded.samples.cwiseAbs().maxCoeff() : 0.0;
    if (peak > lambda) {
      throw ConfigError("recon: input samples exceed lambda=" + num(lambda) + "; is --lambda right?");
    }
    if (!opt.reference.empty()) original = io::read_signal_csv(opt.reference);
  } else {
    if (!opt.reference.empty()) throw ConfigError("recon: --reference requires --input");
    const double snr = opt.snr ? parse_snr(*opt.snr) : kNoiseless;
    ExperimentConfig cfg;
    cfg.n_samples = opt.n_samples.value_or(1024);
    cfg.lambda = lambda;
    cfg.num_tones = opt.tones.value_or(5);
    cfg.on_grid = !opt.off_grid;
    // Same signal as `gen --seed`.
    const TrialInput in = make_input(cfg, of, snr, seed, derive_seed(seed, 2));
    folded = in.folded;
    original = in.original;
  }

  const auto mask = out_of_band_indices(folded.samples.size(), of);
  const ReconResult result = reconstruct(method, folded, mask, seed);
  if (!opt.out.empty()) {
    write_or_print(opt.out, result.signal_estimate);
  }
  say(opt, "method: " + to_string(method) + "  N=" + std::to_string(folded.samples.size()) + "  OF=" + num(of) +
               "  iterations=" + std::to_string(result.iterations_run) + "  time_ms=" + num(result.elapsed_ms));
  if (original) {
    const double e = nmse(*original, result.signal_estimate);
    // Printed even with --quiet: it is the result.
    std::cout << "NMSE: " << num(e) << " (" << num(to_db(e)) << " dB)\n";
  }
  return 0;
}

ExperimentConfig sweep_config(const Options& opt) {
  ExperimentConfig cfg = opt.config_path.empty() ? ExperimentConfig{} : load_config(opt.config_path);
  if (!opt.sweep_var.empty()) cfg.sweep.variable = parse_sweep_variable(opt.sweep_var);
  if (!opt.values.empty()) {
    cfg.sweep.values.clear();
    for (const auto& v : opt.values) {
      cfg.sweep.values.push_back(cfg.sweep.variable == SweepVariable::snr ? parse_snr(v)
                                                                          : io::parse_double(v, "--values"));
    }
  } else if (!opt.sweep_var.empty() && opt.config_path.empty() && cfg.sweep.variable == SweepVariable::of) {
    cfg.sweep.values = default_of_sweep().sweep.values;
  }
  if (opt.of) {
    if (cfg.sweep.variable == SweepVariable::of) throw ConfigError("sweep: --of conflicts with an OF sweep");
    cfg.sweep.fixed_of = *opt.of;
  }
  if (opt.snr) {
    if (cfg.sweep.variable == SweepVariable::snr) throw ConfigError("sweep: --snr conflicts with an SNR sweep");
    cfg.sweep.fixed_snr_db = parse_snr(*opt.snr);
  }
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (opt.n_samples) cfg.n_samples = *opt.n_samples;
  if (opt.lambda) cfg.lambda = *opt.lambda;
  if (opt.tones) cfg.num_tones = *opt.tones;
  if (opt.off_grid) cfg.on_grid = false;
  if (opt.trials) cfg.trials = *opt.trials;
  if (!opt.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : opt.methods) cfg.methods.push_back(parse_method(m));
  }
  cfg.validate();
  return cfg;
}

int cmd_sweep(const Options& opt) {
  const ExperimentConfig cfg = sweep_config(opt);
  const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw NumericalError("cannot create output directory '" + dir.string() + "': " + ec.message());

  say(opt, "sweep over " + to_string(cfg.sweep.variable) + ": " + std::to_string(cfg.sweep.values.size()) +
               " points x " + std::to_string(cfg.trials) + " trials, base_seed " + std::to_string(cfg.base_seed));
  const auto records = run_sweep(cfg);
  const auto summary = summarize(records, cfg.sweep.variable);

  const fs::path raw_path = dir / "raw.csv";
  const fs::path summary_path = dir / "summary.csv";
  emit_csv(records, raw_path.string());
  emit_csv(summary, summary_path.string());
  {
    std::ofstream cfg_out(dir / "config.json");
    cfg_out << config_to_json(cfg).dump(2) << '\n';
  }

  if (!opt.quiet) {
    std::printf("%-11s %10s %14s %14s %10s %12s\n", "method", to_string(cfg.sweep.variable).c_str(), "mean_nmse",
                "mean_nmse_db", "exact", "runtime_ms");
    for (const auto& r : summary) {
      std::printf("%-11s %10g %14.6g %14.3f %10.2f %12.3f\n", to_string(r.method).c_str(), r.sweep_value, r.mean_nmse,
                  r.mean_nmse_db, r.exact_rate, r.mean_runtime_ms);
    }
  }
  say(opt, "wrote " + raw_path.string() + " and " + summary_path.string());

  if (opt.plot) {
    const fs::path plot_path = opt.plot->empty() ? dir / "plot.svg" : fs::path(*opt.plot);
    PlotOptions popt;
    popt.title = cfg.sweep.variable == SweepVariable::snr ? "NMSE vs SNR, OF = " + num(cfg.sweep.fixed_of)
                                                          : "NMSE vs OF, SNR = " + num(cfg.sweep.fixed_snr_db) + " dB";
    emit_plot(summary, plot_path.string(), popt);
    say(opt, "wrote " + plot_path.string());
  }
  return 0;
}

int cmd_selftest(const Options& opt) {
  bool all = true;
  for (const auto& check : selftest::run_all()) {
    all = all && check.passed;
    char line[256];
    std::snprintf(line, sizeof line, "%s  %-34s %s  (%.0f ms)", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                  check.detail.c_str(), check.elapsed_ms);
    if (!opt.quiet || !check.passed) std::cout << line << '\n';
  }
  std::cout << (all ? "selftest: all checks PASS" : "selftest: FAILURES") << '\n';
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction from modulo-folded samples"};
  app.require_subcommand(1);
  Options opt;

  // Shared flags are attached to each subcommand so they may follow it.
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment config (JSON)");
    sub->add_option("--seed", opt.seed, "signal / base seed");
    sub->add_option("--trials", opt.trials, "trials per sweep point")->check(CLI::PositiveNumber);
    sub->add_option("--of", opt.of, "oversampling factor");
    sub->add_option("--snr", opt.snr, "SNR in dB, or inf");
    sub->add_option("--method", opt.methods, "fsr or lasso_b2r2 (repeatable)");
    sub->add_option("--out", opt.out, "output file (gen/fold/recon) or directory (sweep)");
    sub->add_option("--plot", opt.plot, "write an SVG plot (sweep); optional path")->expected(0, 1);
    sub->add_flag("--quiet", opt.quiet, "only print results and errors");
    sub->add_option("--n", opt.n_samples, "number of samples")->check(CLI::Range(8, 1 << 24));
    sub->add_option("--lambda", opt.lambda, "ADC threshold lambda");
    sub->add_option("--tones", opt.tones, "number of sinusoids")->check(CLI::PositiveNumber);
    sub->add_flag("--off-grid", opt.off_grid, "draw tone frequencies off the DFT grid");
    sub->add_option("--input", opt.input, "input signal CSV (n,value)");
    sub->add_option("--reference", opt.reference, "original signal CSV, for NMSE");
    sub->add_option("--sweep", opt.sweep_var, "sweep variable when no config: snr or of");
    sub->add_option("--values", opt.values, "sweep values (comma separated)")->delimiter(',');
  };

  auto* gen = app.add_subcommand("gen", "write a random bandlimited test signal as CSV");
  auto* fold = app.add_subcommand("fold", "apply modulo folding to a signal CSV");
  auto* recon = app.add_subcommand("recon", "reconstruct one instance and print its NMSE");
  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep, write CSV and optional SVG");
  auto* self = app.add_subcommand("selftest", "check fast operators against dense oracles");
  for (auto* sub : {gen, fold, recon, sweep, self}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << failing->help();
    return 1;
  }

  try {
    if (*gen) return cmd_gen(opt);
    if (*fold) return cmd_fold(opt);
    if (*recon) return cmd_recon(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*self) return cmd_selftest(opt);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
