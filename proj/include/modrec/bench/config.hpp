#pragma once

// Experiment configuration for Monte-Carlo sweeps, with a strict JSON schema:
// unknown keys are errors.

#include "modrec/fsr_admm.hpp"
#include "modrec/lasso_b2r2.hpp"
#include "modrec/spectral_operators.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace modrec::bench {

using Json = nlohmann::json;

enum class Method { fsr, lasso_b2r2 };
enum class SweepVariable { snr, of };
enum class NoisePosition { post_fold, pre_fold };

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

inline std::string to_string(Method m) { return m == Method::fsr ? "fsr" : "lasso_b2r2"; }
inline std::string to_string(SweepVariable v) { return v == SweepVariable::snr ? "snr" : "of"; }
inline std::string to_string(NoisePosition p) { return p == NoisePosition::post_fold ? "post_fold" : "pre_fold"; }

inline Method parse_method(const std::string& s) {
  if (s == "fsr") return Method::fsr;
  if (s == "lasso_b2r2" || s == "lasso") return Method::lasso_b2r2;
  throw ConfigError("unknown method '" + s + "' (expected fsr or lasso_b2r2)");
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "snr") return SweepVariable::snr;
  if (s == "of") return SweepVariable::of;
  throw ConfigError("unknown sweep variable '" + s + "' (expected snr or of)");
}

inline NoisePosition parse_noise_position(const std::string& s) {
  if (s == "post_fold") return NoisePosition::post_fold;
  if (s == "pre_fold") return NoisePosition::pre_fold;
  throw ConfigError("unknown noise_position '" + s + "' (expected post_fold or pre_fold)");
}

/// "inf" (any case), "+inf" or a finite number of dB.
inline double parse_snr(const std::string& s) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return kNoiseless;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("invalid SNR '" + s + "' (dB number or inf)");
  return v;
}

struct Sweep {
  SweepVariable variable = SweepVariable::snr;
  std::vector<double> values{0, 5, 10, 15, 20, 25, 30, 35};
  double fixed_of = 6.0;      // used when sweeping SNR
  double fixed_snr_db = 20.0; // used when sweeping OF
};

struct ExperimentConfig {
  Eigen::Index n_samples = 1024;
  double sample_period = 0.01;
  double lambda = 0.25;
  int num_tones = 5;
  int trials = 25;
  std::uint64_t base_seed = 0;
  Sweep sweep;
  std::vector<Method> methods{Method::fsr, Method::lasso_b2r2};
  FsrParams fsr_params;
  IstaParams ista_params;
  bool on_grid = true;
  NoisePosition noise_position = NoisePosition::post_fold;

  /// (OF, SNR) of sweep point i.
  [[nodiscard]] double of_at(std::size_t i) const {
    return sweep.variable == SweepVariable::of ? sweep.values.at(i) : sweep.fixed_of;
  }
  [[nodiscard]] double snr_at(std::size_t i) const {
    return sweep.variable == SweepVariable::snr ? sweep.values.at(i) : sweep.fixed_snr_db;
  }

  void validate() const {
    detail::require(n_samples >= 8, "config: n_samples must be >= 8");
    detail::require(sample_period > 0.0 && std::isfinite(sample_period), "config: sample_period must be positive");
    detail::require(lambda > 0.0 && std::isfinite(lambda), "config: lambda must be positive");
    detail::require(num_tones >= 1, "config: num_tones must be >= 1");
    detail::require(trials >= 1, "config: trials must be >= 1");
    detail::require(!sweep.values.empty(), "config: sweep values must be non-empty");
    detail::require(!methods.empty(), "config: at least one method is required");
    fsr_params.validate();
    detail::require(ista_params.max_iters >= 1, "config: ista_params.max_iters must be >= 1");
    detail::require(ista_params.gamma_fraction >= 0.0, "config: ista_params.gamma_fraction must be >= 0");
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
      const double snr = snr_at(i);
      detail::require(!std::isnan(snr) && snr != -kNoiseless, "config: SNR must be a number or inf");
      const double of = of_at(i);
      detail::require(std::isfinite(of) && of > 1.0, "config: every OF must exceed 1");
      // Throws for an empty mask.
      (void)out_of_band_indices(n_samples, of);
      detail::require(highest_in_band_bin(n_samples, of) >= 1 || !on_grid,
                      "config: no in-band DFT bin for OF=" + std::to_string(of));
    }
  }
};

namespace schema {

inline void reject_unknown_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown field '" + item.key() + "'");
  }
}

template <typename T>
T get_as(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline double snr_from_json(const Json& v, const std::string& where) {
  if (v.is_string()) return parse_snr(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw ConfigError(where + ": SNR must be a number or \"inf\"");
}

inline Json snr_to_json(double snr) {
  if (std::isinf(snr)) return "inf";
  return snr;
}

template <typename T>
void read_optional_number(const Json& obj, const std::string& key, std::optional<T>& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  out = get_as<T>(obj, key, where);
}

inline FsrParams fsr_params_from_json(const Json& j) {
  const std::string where = "fsr_params";
  reject_unknown_keys(j, {"gamma1", "gamma2", "rho", "max_iters", "init_seed", "tolerance", "history_limit"}, where);
  FsrParams p;
  if (j.contains("gamma1")) p.gamma1 = get_as<double>(j, "gamma1", where);
  if (j.contains("gamma2")) p.gamma2 = get_as<double>(j, "gamma2", where);
  if (j.contains("rho")) p.rho = get_as<double>(j, "rho", where);
  if (j.contains("max_iters")) p.max_iters = get_as<int>(j, "max_iters", where);
  if (j.contains("init_seed")) p.init_seed = get_as<std::uint64_t>(j, "init_seed", where);
  read_optional_number(j, "tolerance", p.tolerance, where);
  if (j.contains("history_limit")) p.history_limit = get_as<std::size_t>(j, "history_limit", where);
  return p;
}

inline IstaParams ista_params_from_json(const Json& j) {
  const std::string where = "ista_params";
  reject_unknown_keys(j, {"gamma", "gamma_fraction", "max_iters", "step_size", "round_differences", "history_limit"},
                      where);
  IstaParams p;
  read_optional_number(j, "gamma", p.gamma, where);
  if (j.contains("gamma_fraction")) p.gamma_fraction = get_as<double>(j, "gamma_fraction", where);
  if (j.contains("max_iters")) p.max_iters = get_as<int>(j, "max_iters", where);
  read_optional_number(j, "step_size", p.step_size, where);
  if (j.contains("round_differences")) p.round_differences = get_as<bool>(j, "round_differences", where);
  if (j.contains("history_limit")) p.history_limit = get_as<std::size_t>(j, "history_limit", where);
  return p;
}

inline Sweep sweep_from_json(const Json& j) {
  const std::string where = "sweep";
  reject_unknown_keys(j, {"variable", "values", "of", "snr_db"}, where);
  Sweep s;
  s.variable = parse_sweep_variable(get_as<std::string>(j, "variable", where));
  if (!j.contains("values")) throw ConfigError("sweep: missing field 'values'");
  const Json& values = j.at("values");
  if (!values.is_array()) throw ConfigError("sweep.values: expected an array");
  s.values.clear();
  for (const auto& v : values) {
    if (s.variable == SweepVariable::snr) {
      s.values.push_back(snr_from_json(v, "sweep.values"));
    } else {
      if (!v.is_number()) throw ConfigError("sweep.values: OF values must be numbers");
      s.values.push_back(v.get<double>());
    }
  }
  if (s.variable == SweepVariable::snr) {
    if (j.contains("snr_db")) throw ConfigError("sweep: 'snr_db' is not allowed when sweeping snr");
    if (j.contains("of")) s.fixed_of = get_as<double>(j, "of", where);
  } else {
    if (j.contains("of")) throw ConfigError("sweep: 'of' is not allowed when sweeping of");
    if (j.contains("snr_db")) s.fixed_snr_db = snr_from_json(j.at("snr_db"), "sweep.snr_db");
  }
  return s;
}

}  // namespace schema

inline ExperimentConfig config_from_json(const Json& j) {
  const std::string where = "config";
  schema::reject_unknown_keys(j,
                              {"n_samples", "sample_period", "lambda", "num_tones", "trials", "base_seed", "sweep",
                               "methods", "fsr_params", "ista_params", "on_grid", "noise_position"},
                              where);
  ExperimentConfig c;
  if (j.contains("n_samples")) c.n_samples = schema::get_as<Eigen::Index>(j, "n_samples", where);
  if (j.contains("sample_period")) c.sample_period = schema::get_as<double>(j, "sample_period", where);
  if (j.contains("lambda")) c.lambda = schema::get_as<double>(j, "lambda", where);
  if (j.contains("num_tones")) c.num_tones = schema::get_as<int>(j, "num_tones", where);
  if (j.contains("trials")) c.trials = schema::get_as<int>(j, "trials", where);
  if (j.contains("base_seed")) c.base_seed = schema::get_as<std::uint64_t>(j, "base_seed", where);
  if (j.contains("sweep")) c.sweep = schema::sweep_from_json(j.at("sweep"));
  if (j.contains("methods")) {
    const Json& m = j.at("methods");
    if (!m.is_array()) throw ConfigError("methods: expected an array");
    c.methods.clear();
    for (const auto& name : m) {
      if (!name.is_string()) throw ConfigError("methods: expected strings");
      c.methods.push_back(parse_method(name.get<std::string>()));
    }
  }
  if (j.contains("fsr_params")) c.fsr_params = schema::fsr_params_from_json(j.at("fsr_params"));
  if (j.contains("ista_params")) c.ista_params = schema::ista_params_from_json(j.at("ista_params"));
  if (j.contains("on_grid")) c.on_grid = schema::get_as<bool>(j, "on_grid", where);
  if (j.contains("noise_position")) {
    c.noise_position = parse_noise_position(schema::get_as<std::string>(j, "noise_position", where));
  }
  c.validate();
  return c;
}

inline Json config_to_json(const ExperimentConfig& c) {
  Json sweep{{"variable", to_string(c.sweep.variable)}};
  Json values = Json::array();
  for (double v : c.sweep.values) values.push_back(c.sweep.variable == SweepVariable::snr ? schema::snr_to_json(v) : Json(v));
  sweep["values"] = values;
  if (c.sweep.variable == SweepVariable::snr) {
    sweep["of"] = c.sweep.fixed_of;
  } else {
    sweep["snr_db"] = schema::snr_to_json(c.sweep.fixed_snr_db);
  }

  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));

  const auto& f = c.fsr_params;
  Json fsr{{"gamma1", f.gamma1}, {"gamma2", f.gamma2},           {"rho", f.rho},
           {"max_iters", f.max_iters}, {"init_seed", f.init_seed}, {"history_limit", f.history_limit}};
  fsr["tolerance"] = f.tolerance ? Json(*f.tolerance) : Json(nullptr);

  const auto& i = c.ista_params;
  Json ista{{"gamma_fraction", i.gamma_fraction},
            {"max_iters", i.max_iters},
            {"round_differences", i.round_differences},
            {"history_limit", i.history_limit}};
  ista["gamma"] = i.gamma ? Json(*i.gamma) : Json(nullptr);
  ista["step_size"] = i.step_size ? Json(*i.step_size) : Json(nullptr);

  return Json{{"n_samples", c.n_samples}, {"sample_period", c.sample_period},
              {"lambda", c.lambda},       {"num_tones", c.num_tones},
              {"trials", c.trials},       {"base_seed", c.base_seed},
              {"sweep", sweep},           {"methods", methods},
              {"fsr_params", fsr},        {"ista_params", ista},
              {"on_grid", c.on_grid},     {"noise_position", to_string(c.noise_position)}};
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Full-size SNR sweep at OF = 6.
inline ExperimentConfig default_snr_sweep() { return ExperimentConfig{}; }

/// Full-size OF sweep at 20 dB.
inline ExperimentConfig default_of_sweep() {
  ExperimentConfig c;
  c.sweep.variable = SweepVariable::of;
  c.sweep.values = {2, 3, 4, 5, 6, 7, 8, 9};
  return c;
}

}  // namespace modrec::bench
