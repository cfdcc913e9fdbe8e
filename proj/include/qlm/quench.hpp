#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlm/analysis.hpp"
#include "qlm/gauge_basis.hpp"
#include "qlm/observables.hpp"
#include "qlm/operators.hpp"
#include "qlm/propagator.hpp"
#include "qlm/timeseries.hpp"

namespace qlm {

struct RunConfig {
  ModelSpec model;
  PropagatorConfig propagator;
  double t_max = 30.0;
  std::string output_prefix = "quench";
  bool emit_components = true;
  ClassifyOptions classify;
};

// Unvalidated settings as they come from flags or a config file.
struct RawRunConfig {
  std::optional<std::string> spin;
  std::optional<int> length;
  std::optional<double> mass;
  std::optional<double> kappa;
  std::optional<std::string> model;
  std::optional<std::string> initial_vacuum;
  std::optional<double> tmax;
  std::optional<double> dt;
  std::optional<int> krylov_dim;
  std::optional<double> tol;
  std::optional<double> window;
  std::optional<std::string> out;
  bool no_components = false;
};

// Carries the offending flag so diagnostics can name it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string flag, const std::string& message)
      : std::invalid_argument(flag + ": " + message), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

inline constexpr const char* output_dir_env = "QLM_OUTPUT_DIR";

// Keeps the Hilbert space in the tens of thousands for the common spins.
inline int default_length(const SpinValue& spin) {
  switch (spin.twice()) {
    case 1: return 20;
    case 2: return 14;
    case 3: return 12;
    default: return 10;
  }
}

inline RunConfig validate(const RawRunConfig& raw) {
  RunConfig cfg;
  if (!raw.spin) throw ConfigError("--spin", "is required (e.g. 1/2, 1, 3/2)");
  try {
    cfg.model.spin = SpinValue::from(HalfInt::parse(*raw.spin));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--spin", e.what());
  }

  cfg.model.length = raw.length.value_or(default_length(cfg.model.spin));
  if (cfg.model.length < 2 || cfg.model.length % 2 != 0) {
    throw ConfigError("--length", "must be an even integer >= 2, got " + std::to_string(cfg.model.length));
  }
  if (cfg.model.length > ModelSpec::max_length) {
    throw ConfigError("--length", "must not exceed " + std::to_string(ModelSpec::max_length));
  }

  cfg.model.mu = raw.mass.value_or(0.0);
  if (!std::isfinite(cfg.model.mu)) throw ConfigError("--mass", "must be finite");
  cfg.model.kappa = raw.kappa.value_or(0.0);
  if (!std::isfinite(cfg.model.kappa)) throw ConfigError("--kappa", "must be finite");
  cfg.model.J = 1.0;

  try {
    cfg.model.kind = parse_model_kind(raw.model.value_or("qlm"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--model", e.what());
  }

  if (raw.initial_vacuum) {
    HalfInt mz;
    try {
      mz = HalfInt::parse(*raw.initial_vacuum);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--initial-vacuum", e.what());
    }
    if (mz.abs().twice() > cfg.model.spin.twice()) {
      throw ConfigError("--initial-vacuum", mz.to_string() + " exceeds S = " + cfg.model.spin.value().to_string());
    }
    if (!cfg.model.spin.admits(mz)) {
      throw ConfigError("--initial-vacuum", mz.to_string() + " has the wrong parity for S = " +
                                                cfg.model.spin.value().to_string());
    }
    cfg.model.initial_mz = mz;
  } else {
    cfg.model.initial_mz = cfg.model.spin.value();
  }

  cfg.t_max = raw.tmax.value_or(30.0);
  if (!(cfg.t_max >= 0.0) || !std::isfinite(cfg.t_max)) {
    throw ConfigError("--tmax", "must be finite and >= 0");
  }
  cfg.propagator.dt = raw.dt.value_or(0.01);
  if (!(cfg.propagator.dt > 0.0) || !std::isfinite(cfg.propagator.dt)) throw ConfigError("--dt", "must be positive");
  cfg.propagator.krylov_dim = raw.krylov_dim.value_or(30);
  if (cfg.propagator.krylov_dim < 2) throw ConfigError("--krylov-dim", "must be >= 2");
  cfg.propagator.tol = raw.tol.value_or(1e-12);
  if (!(cfg.propagator.tol > 0.0)) throw ConfigError("--tol", "must be positive");
  cfg.classify.window = raw.window.value_or(0.5);
  if (!(cfg.classify.window >= 0.0)) throw ConfigError("--window", "must be >= 0");

  std::string prefix = raw.out.value_or("quench");
  if (prefix.empty()) throw ConfigError("--out", "must not be empty");
  if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0') {
    const std::filesystem::path p(prefix);
    if (p.is_relative()) prefix = (std::filesystem::path(dir) / p).string();
  }
  cfg.output_prefix = prefix;
  cfg.emit_components = !raw.no_components;
  return cfg;
}

struct RunResult {
  RunConfig config;
  std::size_t dim = 0;
  QuenchTimeSeries series;
  Detection dqpts;
  Detection op_zeros;
  Detection rr_minima;
  CoincidenceReport report;
  EvolutionStats evolution;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
};

// Basis, Hamiltonian, evolution, observables and event analysis. No file I/O.
inline RunResult simulate(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.model.validate();
  cfg.propagator.validate();

  RunResult result;
  result.config = cfg;
  if (cfg.model.below_physical_size()) {
    result.warnings.push_back("L = " + std::to_string(cfg.model.length) +
                              " is below the physically meaningful size; use for oracle checks only");
  }

  const auto basis = enumerate_basis(cfg.model);
  const auto h = build_hamiltonian(basis);
  const auto vacua = vacuum_set(basis);
  const ObservableTables tables(basis);
  result.dim = basis.size();

  StateVector psi0(basis.size(), Complex{0.0, 0.0});
  psi0[vacuum_state(basis, cfg.model.initial_mz)] = 1.0;

  auto& series = result.series;
  series.model = cfg.model;
  series.dt = cfg.propagator.dt;
  series.labels = vacua.labels;
  const std::size_t count = sample_count(cfg.t_max, cfg.propagator.dt);
  series.rates.reserve(count);
  series.observables.reserve(count);

  double energy0 = 0.0;
  result.evolution = evolve(h, psi0, cfg.t_max, cfg.propagator, [&](double t, std::span<const Complex> psi) {
    ObservableSample o;
    o.time = t;
    o.flux = tables.flux(psi);
    o.condensate = tables.condensate(psi);
    o.energy = std::real(expectation(h, psi));
    o.norm = vector_norm(psi);
    if (series.observables.empty()) energy0 = o.energy;
    result.max_norm_drift = std::max(result.max_norm_drift, std::abs(o.norm - 1.0));
    result.max_energy_drift = std::max(result.max_energy_drift, std::abs(o.energy - energy0));
    series.rates.push_back(rate_components(basis, psi, vacua, t));
    series.observables.push_back(o);
  });

  result.dqpts = find_dqpts(series);
  result.op_zeros = find_op_zeros(series);
  result.rr_minima = find_rr_minima(series);
  result.report = classify(result.dqpts.events, result.op_zeros.events, cfg.model.spin, cfg.classify);
  for (const auto* d : {&result.dqpts, &result.op_zeros, &result.rr_minima}) {
    result.warnings.insert(result.warnings.end(), d->warnings.begin(), d->warnings.end());
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace qlm
