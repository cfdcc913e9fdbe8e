#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qlm/format.hpp"
#include "qlm/model.hpp"
#include "qlm/timeseries.hpp"

namespace qlm {

enum class EventKind { dqpt_crossing, op_zero, rr_local_min };

// Dominance passes from one vacuum's rate component to another's.
struct DqptCrossing {
  HalfInt from_mz;
  HalfInt to_mz;
};

// Sign change of the electric flux; direction is the sign after the zero.
struct OpZero {
  int direction = 0;
};

// Local minimum of the full return rate; major when the dominant vacuum is extreme.
struct RrLocalMin {
  HalfInt mz;
  double value = 0.0;
  bool major = false;
};

struct Event {
  double time = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::variant<DqptCrossing, OpZero, RrLocalMin> detail;

  EventKind kind() const noexcept { return static_cast<EventKind>(detail.index()); }
  const DqptCrossing& crossing() const { return std::get<DqptCrossing>(detail); }
  const OpZero& op_zero() const { return std::get<OpZero>(detail); }
  const RrLocalMin& rr_min() const { return std::get<RrLocalMin>(detail); }
};

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::dqpt_crossing: return "dqpt_crossing";
    case EventKind::op_zero: return "op_zero";
    case EventKind::rr_local_min: return "rr_local_min";
  }
  return "unknown";
}

struct Detection {
  std::vector<Event> events;
  std::vector<std::string> warnings;
};

namespace detail {

// Dominant component index per sample. Within tol_deg of the minimum the
// previous sample's dominant component is kept, so exact degeneracies do not flicker.
inline std::vector<std::optional<std::size_t>> dominance(const QuenchTimeSeries& series, double tol_deg) {
  std::vector<std::optional<std::size_t>> dom(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& comps = series.rates[i].components;
    double best = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> arg;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (comps[k].finite() && comps[k].lambda < best) {
        best = comps[k].lambda;
        arg = k;
      }
    }
    if (arg && i > 0 && dom[i - 1]) {
      const auto prev = *dom[i - 1];
      if (comps[prev].finite() && comps[prev].lambda <= best + tol_deg) arg = prev;
    }
    dom[i] = arg;
  }
  return dom;
}

}  // namespace detail

// Crossings of the linearly interpolated rate components wherever the dominant
// vacuum changes between samples. If several components take over inside one
// interval, the lower envelope is followed and one event per hand-over is emitted.
inline Detection find_dqpts(const QuenchTimeSeries& series, double tol_deg = 1e-12) {
  Detection out;
  const auto dom = detail::dominance(series, tol_deg);
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!dom[i - 1] || !dom[i] || *dom[i - 1] == *dom[i]) continue;
    const auto& left = series.rates[i - 1].components;
    const auto& right = series.rates[i].components;
    const double t_lo = series.time(i - 1);
    const double t_hi = series.time(i);
    const std::size_t a = *dom[i - 1];
    const std::size_t b = *dom[i];

    auto finite_both = [&](std::size_t k) { return left[k].finite() && right[k].finite(); };
    if (!finite_both(a) || !finite_both(b)) {
      out.warnings.push_back("dominance change " + left[a].mz.to_string() + " -> " + right[b].mz.to_string() +
                             " in [" + format_double(t_lo) + ", " + format_double(t_hi) +
                             "] involves an infinite rate component; no crossing reported");
      continue;
    }

    std::size_t cur = a;
    double s = 0.0;
    for (std::size_t guard = 0; guard < left.size(); ++guard) {
      std::optional<std::size_t> next;
      double next_root = 2.0;
      for (std::size_t k = 0; k < left.size(); ++k) {
        if (k == cur || !finite_both(k)) continue;
        const double d0 = left[cur].lambda - left[k].lambda;
        const double d1 = right[cur].lambda - right[k].lambda;
        if (!(d1 > 0.0)) continue;  // k is not below cur at the right end
        const double root = std::clamp(d0 >= 0.0 ? 0.0 : d0 / (d0 - d1), 0.0, 1.0);
        if (root < s) continue;
        if (root < next_root || (root == next_root && right[k].lambda < right[*next].lambda)) {
          next_root = root;
          next = k;
        }
      }
      if (!next) break;
      Event e;
      e.time = t_lo + next_root * (t_hi - t_lo);
      e.t_lo = t_lo;
      e.t_hi = t_hi;
      e.detail = DqptCrossing{left[cur].mz, left[*next].mz};
      out.events.push_back(e);
      cur = *next;
      s = next_root;
    }
  }
  return out;
}

// Zeros of a sampled signal by sign change and linear interpolation. Samples with
// |value| <= zero_tol count as exact zeros; a run of exact zeros between opposite
// signs yields one event at its first point, bracketed by the following interval.
inline Detection find_zeros(std::span<const double> values, double dt, double zero_tol = 1e-12) {
  Detection out;
  auto sign_of = [&](double v) { return std::abs(v) <= zero_tol ? 0 : (v > 0 ? 1 : -1); };
  std::optional<std::size_t> last_nonzero;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int sg = sign_of(values[i]);
    if (sg == 0) continue;
    if (last_nonzero && sign_of(values[*last_nonzero]) != sg) {
      Event e;
      if (*last_nonzero + 1 == i) {
        const double v0 = values[i - 1];
        const double v1 = values[i];
        e.t_lo = static_cast<double>(i - 1) * dt;
        e.t_hi = static_cast<double>(i) * dt;
        e.time = e.t_lo + dt * v0 / (v0 - v1);
      } else {
        const std::size_t first_zero = *last_nonzero + 1;
        e.time = static_cast<double>(first_zero) * dt;
        e.t_lo = e.time;
        e.t_hi = static_cast<double>(first_zero + 1) * dt;
      }
      e.detail = OpZero{sg};
      out.events.push_back(e);
    }
    last_nonzero = i;
  }
  return out;
}

inline Detection find_op_zeros(const QuenchTimeSeries& series, double zero_tol = 1e-12) {
  const auto flux = series.flux_values();
  return find_zeros(flux, series.dt, zero_tol);
}

struct LocalMinimum {
  std::size_t index = 0;  // grid point of the discrete minimum
  double time = 0.0;      // parabola-refined
  double value = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

// Strict three-point minima, refined by the parabola through the neighbours.
// A flat bottom reports its leftmost point and a warning.
inline std::vector<LocalMinimum> find_local_minima(std::span<const double> values, double dt,
                                                   std::vector<std::string>* warnings = nullptr) {
  std::vector<LocalMinimum> out;
  const std::size_t n = values.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(values[i - 1] > values[i]) || !std::isfinite(values[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    if (j + 1 >= n || !(values[j + 1] > values[i])) {
      i = j + 1;
      continue;
    }
    if (j > i && warnings) {
      warnings->push_back("flat local minimum over samples " + std::to_string(i) + ".." + std::to_string(j) +
                          "; leftmost point reported");
    }
    LocalMinimum m;
    m.index = i;
    const double y0 = values[i - 1];
    const double y1 = values[i];
    const double y2 = values[i + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    double delta = 0.0;
    if (std::isfinite(y0) && std::isfinite(y2) && curvature > 0.0) delta = 0.5 * (y0 - y2) / curvature;
    delta = std::clamp(delta, -0.5, 0.5);
    const double ti = static_cast<double>(i) * dt;
    m.time = ti + delta * dt;
    m.value = (std::isfinite(y0) && std::isfinite(y2)) ? y1 - 0.25 * (y0 - y2) * delta : y1;
    m.t_lo = delta >= 0.0 ? ti : ti - dt;
    m.t_hi = m.t_lo + dt;
    out.push_back(m);
    i = j + 1;
  }
  return out;
}

inline Detection find_rr_minima(const QuenchTimeSeries& series) {
  Detection out;
  const auto rr = series.lambda_min_values();
  const int twice_s = series.labels.empty() ? 0 : series.labels.front().abs().twice();
  for (const auto& m : find_local_minima(rr, series.dt, &out.warnings)) {
    const HalfInt mz = series.rates[m.index].argmin_mz;
    Event e;
    e.time = m.time;
    e.t_lo = m.t_lo;
    e.t_hi = m.t_hi;
    e.detail = RrLocalMin{mz, m.value, mz.abs().twice() == twice_s};
    out.events.push_back(e);
  }
  return out;
}

enum class Classification { coincides_with_dqpt, midpoint_between, unmatched };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::coincides_with_dqpt: return "coincides_with_dqpt";
    case Classification::midpoint_between: return "midpoint_between";
    case Classification::unmatched: return "unmatched";
  }
  return "unknown";
}

struct Pairing {
  std::size_t op_zero = 0;        // index into CoincidenceReport::op_zeros
  Classification classification = Classification::unmatched;
  std::vector<std::size_t> dqpts;  // one index (coincidence) or two (flanking pair)
  double time_discrepancy = std::numeric_limits<double>::quiet_NaN();  // zero time minus reference time
};

struct CoincidenceReport {
  std::vector<Event> dqpts;
  std::vector<Event> op_zeros;
  std::vector<Pairing> pairings;
};

struct ClassifyOptions {
  double window = 0.5;              // units of 1/J
  double midpoint_fraction = 0.15;  // of the flanking-DQPT separation, integer S
};

// Half-integer S: an OP zero coincides with a DQPT if a +-1/2 swap lies within the window.
// Integer S: an OP zero sits at the midpoint of the flanking DQPTs that hand dominance
// to and away from m_z = 0 when its offset from their midpoint is within both the
// window and midpoint_fraction of their separation.
inline CoincidenceReport classify(std::vector<Event> dqpts, std::vector<Event> op_zeros, const SpinValue& spin,
                                  const ClassifyOptions& options = {}) {
  auto by_time = [](const Event& a, const Event& b) { return a.time < b.time; };
  std::sort(dqpts.begin(), dqpts.end(), by_time);
  std::sort(op_zeros.begin(), op_zeros.end(), by_time);
  CoincidenceReport report;
  report.dqpts = std::move(dqpts);
  report.op_zeros = std::move(op_zeros);

  const HalfInt half = HalfInt::from_twice(1);
  const HalfInt zero = HalfInt::from_twice(0);

  for (std::size_t z = 0; z < report.op_zeros.size(); ++z) {
    const double tz = report.op_zeros[z].time;
    Pairing p;
    p.op_zero = z;

    if (!spin.is_integer()) {
      std::optional<std::size_t> nearest;
      for (std::size_t d = 0; d < report.dqpts.size(); ++d) {
        const auto& c = report.dqpts[d].crossing();
        const bool swap = c.from_mz.abs() == half && c.to_mz.abs() == half && c.from_mz != c.to_mz;
        if (!swap) continue;
        if (!nearest || std::abs(report.dqpts[d].time - tz) < std::abs(report.dqpts[*nearest].time - tz)) {
          nearest = d;
        }
      }
      if (nearest) {
        p.time_discrepancy = tz - report.dqpts[*nearest].time;
        if (std::abs(p.time_discrepancy) <= options.window) {
          p.classification = Classification::coincides_with_dqpt;
          p.dqpts = {*nearest};
        }
      }
    } else {
      std::optional<std::size_t> before;
      std::optional<std::size_t> after;
      for (std::size_t d = 0; d < report.dqpts.size(); ++d) {
        if (report.dqpts[d].time <= tz) before = d;
        if (report.dqpts[d].time >= tz && !after) after = d;
      }
      if (before && after && *before != *after && report.dqpts[*before].crossing().to_mz == zero &&
          report.dqpts[*after].crossing().from_mz == zero) {
        const double t_in = report.dqpts[*before].time;
        const double t_out = report.dqpts[*after].time;
        const double midpoint = 0.5 * (t_in + t_out);
        p.time_discrepancy = tz - midpoint;
        const double dev = std::abs(p.time_discrepancy);
        if (dev < options.midpoint_fraction * (t_out - t_in) && dev < options.window) {
          p.classification = Classification::midpoint_between;
          p.dqpts = {*before, *after};
        }
      }
    }
    report.pairings.push_back(p);
  }
  return report;
}

}  // namespace qlm
