#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <json.hpp>

#include "qlm/analysis.hpp"
#include "qlm/format.hpp"
#include "qlm/quench.hpp"
#include "qlm/timeseries.hpp"

namespace qlm {

// Columns: t, lambda_min, argmin_mz, lambda[m_z] for m_z = S..-S, flux, condensate, energy, norm.
inline void write_timeseries_csv(std::ostream& os, const QuenchTimeSeries& series, bool emit_components = true) {
  os << "t,lambda_min,argmin_mz";
  if (emit_components) {
    for (auto mz : series.labels) os << ",lambda[" << mz.to_string() << ']';
  }
  os << ",flux,condensate,energy,norm\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series.rates[i];
    const auto& o = series.observables[i];
    os << format_double(series.time(i)) << ',' << format_double(r.lambda_min) << ','
       << (std::isfinite(r.lambda_min) ? r.argmin_mz.to_string() : std::string("none"));
    if (emit_components) {
      for (const auto& c : r.components) os << ',' << format_double(c.lambda);
    }
    os << ',' << format_double(o.flux) << ',' << format_double(o.condensate) << ',' << format_double(o.energy) << ','
       << format_double(o.norm) << '\n';
  }
}

inline nlohmann::json to_json(const ModelSpec& m) {
  return {{"spin", m.spin.value().to_string()},
          {"length", m.length},
          {"J", m.J},
          {"mu", m.mu},
          {"kappa", m.kappa},
          {"kind", std::string(to_string(m.kind))},
          {"initial_mz", m.initial_mz.to_string()}};
}

inline nlohmann::json to_json(const Event& e) {
  nlohmann::json j{{"kind", std::string(to_string(e.kind()))}, {"time", e.time}, {"bracket", {e.t_lo, e.t_hi}}};
  switch (e.kind()) {
    case EventKind::dqpt_crossing:
      j["from_mz"] = e.crossing().from_mz.to_string();
      j["to_mz"] = e.crossing().to_mz.to_string();
      break;
    case EventKind::op_zero:
      j["direction"] = e.op_zero().direction;
      break;
    case EventKind::rr_local_min:
      j["mz"] = e.rr_min().mz.to_string();
      j["value"] = e.rr_min().value;
      j["major"] = e.rr_min().major;
      break;
  }
  return j;
}

inline nlohmann::json to_json(const CoincidenceReport& report) {
  auto pairings = nlohmann::json::array();
  for (const auto& p : report.pairings) {
    nlohmann::json j{{"op_zero_time", report.op_zeros[p.op_zero].time},
                     {"classification", std::string(to_string(p.classification))}};
    auto times = nlohmann::json::array();
    for (auto d : p.dqpts) times.push_back(report.dqpts[d].time);
    j["dqpt_times"] = times;
    j["time_discrepancy"] = std::isfinite(p.time_discrepancy) ? nlohmann::json(p.time_discrepancy) : nlohmann::json();
    pairings.push_back(j);
  }
  return pairings;
}

// events.json: model, grid, every event sorted by time, the coincidence pairings, warnings.
inline nlohmann::json events_json(const RunResult& r) {
  std::vector<Event> all;
  for (const auto* d : {&r.dqpts, &r.op_zeros, &r.rr_minima}) all.insert(all.end(), d->events.begin(), d->events.end());
  std::stable_sort(all.begin(), all.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  auto events = nlohmann::json::array();
  for (const auto& e : all) events.push_back(to_json(e));
  return {{"model", to_json(r.config.model)},
          {"dt", r.config.propagator.dt},
          {"t_max", r.config.t_max},
          {"dimension", r.dim},
          {"events", events},
          {"pairings", to_json(r.report)},
          {"classify", {{"window", r.config.classify.window}, {"midpoint_fraction", r.config.classify.midpoint_fraction}}},
          {"warnings", r.warnings}};
}

// Writes to "<path>.tmp" and renames, so a failed run never leaves a partial file.
template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

struct ArtifactPaths {
  std::filesystem::path timeseries;
  std::filesystem::path events;
};

inline ArtifactPaths artifact_paths(const std::string& prefix) {
  return {prefix + "_timeseries.csv", prefix + "_events.json"};
}

inline ArtifactPaths write_artifacts(const RunResult& r) {
  const auto paths = artifact_paths(r.config.output_prefix);
  write_atomically(paths.timeseries,
                   [&](std::ostream& os) { write_timeseries_csv(os, r.series, r.config.emit_components); });
  write_atomically(paths.events, [&](std::ostream& os) { os << events_json(r).dump(2) << '\n'; });
  return paths;
}

inline std::string summary_line(const RunResult& r) {
  std::ostringstream os;
  os << "dim=" << r.dim << " samples=" << r.series.size() << " runtime=" << std::fixed << std::setprecision(3) << r.runtime_seconds << std::defaultfloat << "s"
     << " dqpts=" << r.dqpts.events.size() << " op_zeros=" << r.op_zeros.events.size()
     << " rr_minima=" << r.rr_minima.events.size() << " norm_drift=" << format_double(r.max_norm_drift)
     << " energy_drift=" << format_double(r.max_energy_drift) << " path=" << (r.evolution.dense ? "dense" : "krylov");
  return os.str();
}

}  // namespace qlm
