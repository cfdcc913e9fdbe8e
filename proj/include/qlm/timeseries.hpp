#pragma once

#include <cstddef>
#include <vector>

#include "qlm/model.hpp"
#include "qlm/observables.hpp"

namespace qlm {

// Uniformly sampled trajectory: rates[i] and observables[i] belong to t = i * dt.
struct QuenchTimeSeries {
  ModelSpec model;
  double dt = 0.01;
  std::vector<HalfInt> labels;  // S, ..., -S
  std::vector<RateComponents> rates;
  std::vector<ObservableSample> observables;

  std::size_t size() const noexcept { return rates.size(); }
  double time(std::size_t i) const noexcept { return static_cast<double>(i) * dt; }

  std::vector<double> lambda_min_values() const {
    std::vector<double> out;
    out.reserve(rates.size());
    for (const auto& r : rates) out.push_back(r.lambda_min);
    return out;
  }
  std::vector<double> flux_values() const {
    std::vector<double> out;
    out.reserve(observables.size());
    for (const auto& o : observables) out.push_back(o.flux);
    return out;
  }
  std::vector<double> condensate_values() const {
    std::vector<double> out;
    out.reserve(observables.size());
    for (const auto& o : observables) out.push_back(o.condensate);
    return out;
  }
};

// Series built from per-label component arrays; used for synthetic detector input.
// components[k][i] is lambda_{labels[k]} at t = i * dt.
inline QuenchTimeSeries make_rate_series(const std::vector<HalfInt>& labels,
                                         const std::vector<std::vector<double>>& components, double dt,
                                         const std::vector<double>& flux = {}) {
  QuenchTimeSeries s;
  s.dt = dt;
  s.labels = labels;
  const std::size_t n = components.empty() ? flux.size() : components.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    RateComponents rc;
    rc.time = static_cast<double>(i) * dt;
    for (std::size_t k = 0; k < labels.size(); ++k) rc.components.push_back({labels[k], components[k][i]});
    rc.update_minimum();
    s.rates.push_back(rc);
    ObservableSample o;
    o.time = rc.time;
    o.flux = flux.empty() ? 0.0 : flux[i];
    s.observables.push_back(o);
  }
  return s;
}

}  // namespace qlm
