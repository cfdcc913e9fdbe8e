#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "qlm/gauge_basis.hpp"
#include "qlm/operators.hpp"

namespace qlm {

// Overlaps with |<vac|psi>|^2 below this are reported as an infinite rate.
inline constexpr double overlap_floor = 1e-300;

inline constexpr double infinite_rate = std::numeric_limits<double>::infinity();

struct RateComponent {
  HalfInt mz;
  double lambda = infinite_rate;

  bool finite() const noexcept { return std::isfinite(lambda); }
};

// Per-vacuum return rates at one time; components ordered m_z = S, ..., -S.
struct RateComponents {
  double time = 0.0;
  std::vector<RateComponent> components;
  double lambda_min = infinite_rate;
  HalfInt argmin_mz;

  double lambda(HalfInt mz) const {
    for (const auto& c : components) {
      if (c.mz == mz) return c.lambda;
    }
    throw std::invalid_argument("no rate component for m_z = " + mz.to_string());
  }

  // Recomputes lambda_min / argmin_mz; ties go to the larger m_z.
  void update_minimum() {
    lambda_min = infinite_rate;
    for (const auto& c : components) {
      if (c.finite() && c.lambda < lambda_min) {
        lambda_min = c.lambda;
        argmin_mz = c.mz;
      }
    }
  }
};

struct ObservableSample {
  double time = 0.0;
  double flux = 0.0;
  double condensate = 0.0;
  double energy = 0.0;
  double norm = 0.0;
};

struct VacuumSet {
  std::vector<HalfInt> labels;  // S, S-1, ..., -S
  std::vector<std::size_t> indices;
};

inline VacuumSet vacuum_set(const PhysicalBasis& basis) {
  VacuumSet v;
  v.labels = vacuum_labels(basis.spin());
  for (auto mz : v.labels) v.indices.push_back(vacuum_state(basis, mz));
  return v;
}

// Finite-size rate: -(1/L) ln |<vac|psi>|^2 per vacuum.
inline RateComponents rate_components(const PhysicalBasis& basis, std::span<const Complex> psi, const VacuumSet& vacua,
                                      double time = 0.0) {
  if (psi.size() != basis.size()) throw std::invalid_argument("rate_components: dimension mismatch");
  RateComponents rc;
  rc.time = time;
  const double inv_l = 1.0 / basis.length();
  for (std::size_t k = 0; k < vacua.labels.size(); ++k) {
    const double p = std::min(1.0, std::norm(psi[vacua.indices[k]]));
    const double lambda = p < overlap_floor ? infinite_rate : (p == 1.0 ? 0.0 : -inv_l * std::log(p));
    rc.components.push_back({vacua.labels[k], lambda});
  }
  rc.update_minimum();
  return rc;
}

// Diagonal observables per basis state, for repeated evaluation along a trajectory.
class ObservableTables {
 public:
  explicit ObservableTables(const PhysicalBasis& basis) : flux_(basis.size()), filling_(basis.size()) {
    const int L = basis.length();
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const auto links = basis.twice_links(b);
      int staggered = 0;  // twice the staggered link sum
      int particles = 0;
      for (int j = 0; j < L; ++j) {
        staggered += (j % 2 == 0 ? 1 : -1) * links[static_cast<std::size_t>(j)];
        particles += basis.occupied(b, j) ? 1 : 0;
      }
      flux_[b] = 0.5 * staggered / L;
      filling_[b] = static_cast<double>(particles) / L;
    }
  }

  double flux(std::span<const Complex> psi) const { return weighted(psi, flux_); }
  double condensate(std::span<const Complex> psi) const { return weighted(psi, filling_); }

  std::span<const double> flux_values() const noexcept { return flux_; }
  std::span<const double> filling_values() const noexcept { return filling_; }

 private:
  static double weighted(std::span<const Complex> psi, const std::vector<double>& table) {
    if (psi.size() != table.size()) throw std::invalid_argument("observable: dimension mismatch");
    double acc = 0.0;
    for (std::size_t b = 0; b < psi.size(); ++b) acc += std::norm(psi[b]) * table[b];
    return acc;
  }

  std::vector<double> flux_;
  std::vector<double> filling_;
};

// (1/L) sum_j (-1)^(j+1) <s^z_{j,j+1}>, with the first link counted positively.
inline double electric_flux(const PhysicalBasis& basis, std::span<const Complex> psi) {
  return ObservableTables(basis).flux(psi);
}

// 1/2 + (1/2L) sum_j <sigma^z_j>, i.e. the mean matter filling.
inline double chiral_condensate(const PhysicalBasis& basis, std::span<const Complex> psi) {
  return ObservableTables(basis).condensate(psi);
}

}  // namespace qlm
