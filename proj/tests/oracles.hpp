#pragma once

// Reference constructions used only by the tests. They work in the full
// tensor-product space and share no code path with the library's basis
// recursion or its closed-form hopping amplitudes.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "qlm/model.hpp"

namespace qlm::oracle {

using Config = std::pair<std::vector<int>, std::vector<int>>;  // (occupation n_j, 2 * s^z on link j)

// Gauss generator in 1-based form: G_j = (-1)^j (E_{j-1,j} + E_{j,j+1} + (sigma^z_j + 1)/2).
inline double gauss_generator(const Config& c, int j1) {
  const int L = static_cast<int>(c.first.size());
  const int j = j1 - 1;
  const double left = 0.5 * c.second[static_cast<std::size_t>((j + L - 1) % L)];
  const double right = 0.5 * c.second[static_cast<std::size_t>(j)];
  const double sigma_z = 2.0 * c.first[static_cast<std::size_t>(j)] - 1.0;
  const double sign = (j1 % 2 == 0) ? 1.0 : -1.0;
  return sign * (left + right + 0.5 * (sigma_z + 1.0));
}

// Every (matter, link) product configuration of the full Hilbert space.
inline std::vector<Config> all_configurations(const ModelSpec& m) {
  const int L = m.length;
  const int d = m.spin.link_dim();
  std::vector<Config> out;
  std::int64_t link_count = 1;
  for (int j = 0; j < L; ++j) link_count *= d;
  for (std::int64_t occ = 0; occ < (std::int64_t{1} << L); ++occ) {
    for (std::int64_t lk = 0; lk < link_count; ++lk) {
      Config c{std::vector<int>(static_cast<std::size_t>(L)), std::vector<int>(static_cast<std::size_t>(L))};
      std::int64_t rest = lk;
      for (int j = 0; j < L; ++j) {
        c.first[static_cast<std::size_t>(j)] = static_cast<int>((occ >> j) & 1);
        c.second[static_cast<std::size_t>(j)] = 2 * static_cast<int>(rest % d) - m.spin.twice();
        rest /= d;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline std::set<Config> brute_force_sector(const ModelSpec& m) {
  std::set<Config> out;
  for (auto& c : all_configurations(m)) {
    bool ok = true;
    for (int j = 1; j <= m.length && ok; ++j) ok = std::abs(gauss_generator(c, j)) < 1e-12;
    if (ok) out.insert(std::move(c));
  }
  return out;
}

// Spin-S matrices in the basis m = -S..S (index a = m + S), from the ladder
// relation <m+1|S^+|m> = sqrt((S - m)(S + m + 1)).
struct SpinMatrices {
  Eigen::MatrixXd sz, splus, sminus;
};

inline SpinMatrices spin_matrices(const SpinValue& spin) {
  const int d = spin.link_dim();
  const double s = spin.as_double();
  SpinMatrices out{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (int a = 0; a < d; ++a) {
    const double m = a - s;
    out.sz(a, a) = m;
    if (a + 1 < d) out.splus(a + 1, a) = std::sqrt((s - m) * (s + m + 1.0));
  }
  out.sminus = out.splus.transpose();
  return out;
}

// Pauli lowering in the basis (n = 0, n = 1): sigma^- takes n = 1 to n = 0.
inline Eigen::Matrix2d sigma_minus() {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  m(0, 1) = 1.0;
  return m;
}

// Column of the full-space Hamiltonian for one product configuration, as a sparse
// map configuration -> amplitude. gauge_op is s^+/sqrt(S(S+1)) for the QLM and the
// shift matrix delta_{m,n-1} for the TSM.
inline std::map<Config, double> hamiltonian_column(const ModelSpec& model, const Config& in) {
  const int L = model.length;
  const int d = model.spin.link_dim();
  const auto sm = spin_matrices(model.spin);
  Eigen::MatrixXd gauge_up(d, d);
  if (model.kind == ModelKind::qlm) {
    gauge_up = sm.splus / std::sqrt(model.spin.casimir());
  } else {
    gauge_up = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a + 1 < d; ++a) gauge_up(a + 1, a) = 1.0;
  }
  const Eigen::MatrixXd gauge_down = gauge_up.transpose();
  const Eigen::Matrix2d lower = sigma_minus();
  const Eigen::Matrix2d raise = lower.transpose();
  const Eigen::Matrix2d sigma_z = (Eigen::Matrix2d() << -1.0, 0.0, 0.0, 1.0).finished();

  std::map<Config, double> out;
  auto link_index = [&](int twice) { return (twice + model.spin.twice()) / 2; };

  double diag = 0.0;
  for (int j = 0; j < L; ++j) {
    const int n = in.first[static_cast<std::size_t>(j)];
    const int a = link_index(in.second[static_cast<std::size_t>(j)]);
    diag += model.mu * sigma_z(n, n) + 0.5 * model.kappa * model.kappa * sm.sz(a, a) * sm.sz(a, a);
  }
  if (diag != 0.0) out[in] += diag;

  // (J/2) (sigma^-_j U_{j,j+1} sigma^-_{j+1} + h.c.), applied factor by factor.
  for (int j = 0; j < L; ++j) {
    const int k = (j + 1) % L;
    for (int conj = 0; conj < 2; ++conj) {
      const Eigen::Matrix2d& mat = conj == 0 ? lower : raise;
      const Eigen::MatrixXd& link = conj == 0 ? gauge_up : gauge_down;
      const int nj = in.first[static_cast<std::size_t>(j)];
      const int nk = in.first[static_cast<std::size_t>(k)];
      const int a = link_index(in.second[static_cast<std::size_t>(j)]);
      for (int nj2 = 0; nj2 < 2; ++nj2) {
        for (int nk2 = 0; nk2 < 2; ++nk2) {
          for (int a2 = 0; a2 < d; ++a2) {
            const double amp = 0.5 * model.J * mat(nj2, nj) * link(a2, a) * mat(nk2, nk);
            if (amp == 0.0) continue;
            Config outc = in;
            outc.first[static_cast<std::size_t>(j)] = nj2;
            outc.first[static_cast<std::size_t>(k)] = nk2;
            outc.second[static_cast<std::size_t>(j)] = 2 * a2 - model.spin.twice();
            out[outc] += amp;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace qlm::oracle
