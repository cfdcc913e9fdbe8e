#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlm/format.hpp"
#include "qlm/gauge_basis.hpp"
#include "qlm/model.hpp"

namespace qlm {

using Complex = std::complex<double>;

struct OffDiagonalEntry {
  std::size_t row;
  std::size_t col;  // row < col; the (col, row) entry is implied
  double value;
};

// Real symmetric Hamiltonian over a PhysicalBasis. The upper triangle is kept
// as triplets; a full CSR copy drives matrix-vector products.
class SparseHamiltonian {
 public:
  SparseHamiltonian(ModelSpec model, std::vector<double> diagonal, std::vector<OffDiagonalEntry> upper)
      : model_(std::move(model)), diagonal_(std::move(diagonal)), upper_(std::move(upper)) {
    std::sort(upper_.begin(), upper_.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : upper_) {
      if (e.row >= e.col || e.col >= dim()) {
        throw std::invalid_argument("SparseHamiltonian: entry (" + std::to_string(e.row) + ", " +
                                    std::to_string(e.col) + ") is not strictly upper triangular within dim " +
                                    std::to_string(dim()));
      }
    }
    build_csr();
  }

  const ModelSpec& model() const noexcept { return model_; }
  std::size_t dim() const noexcept { return diagonal_.size(); }
  std::span<const double> diagonal() const noexcept { return diagonal_; }
  std::span<const OffDiagonalEntry> upper() const noexcept { return upper_; }
  std::size_t nonzeros() const noexcept { return dim() + 2 * upper_.size(); }

  // out = H * in. Each row accumulates diagonal first, then columns in ascending order.
  template <typename T>
  void apply(std::span<const T> in, std::span<T> out) const {
    if (in.size() != dim() || out.size() != dim()) {
      throw std::invalid_argument("apply: vector of size " + std::to_string(in.size()) + "/" +
                                  std::to_string(out.size()) + " does not match dim " + std::to_string(dim()));
    }
    for (std::size_t r = 0; r < dim(); ++r) {
      T acc = diagonal_[r] * in[r];
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * in[cols_[k]];
      out[r] = acc;
    }
  }

  template <typename T>
  std::vector<T> apply(std::span<const T> in) const {
    std::vector<T> out(in.size());
    apply<T>(in, std::span<T>(out));
    return out;
  }

  // Largest absolute row sum; an upper bound on the spectral radius.
  double norm_bound() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
      double s = std::abs(diagonal_[r]);
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(values_[k]);
      best = std::max(best, s);
    }
    return best;
  }

 private:
  void build_csr() {
    const std::size_t n = dim();
    std::vector<std::size_t> counts(n, 0);
    for (const auto& e : upper_) {
      ++counts[e.row];
      ++counts[e.col];
    }
    row_ptr_.assign(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] = row_ptr_[r] + counts[r];
    cols_.resize(row_ptr_[n]);
    values_.resize(row_ptr_[n]);
    std::vector<std::size_t> fill(row_ptr_.begin(), row_ptr_.end() - 1);
    for (const auto& e : upper_) {
      cols_[fill[e.row]] = e.col;
      values_[fill[e.row]++] = e.value;
      cols_[fill[e.col]] = e.row;
      values_[fill[e.col]++] = e.value;
    }
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) row.emplace_back(cols_[k], values_[k]);
      std::sort(row.begin(), row.end());
      for (std::size_t k = 0; k < row.size(); ++k) {
        cols_[row_ptr_[r] + k] = row[k].first;
        values_[row_ptr_[r] + k] = row[k].second;
      }
    }
  }

  ModelSpec model_;
  std::vector<double> diagonal_;
  std::vector<OffDiagonalEntry> upper_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

namespace detail {

// <m+1| s^+ |m> = sqrt(S(S+1) - m(m+1)), m given as 2m.
inline double spin_raise_element(const SpinValue& spin, int twice_m) {
  const double m = 0.5 * twice_m;
  return std::sqrt(std::max(0.0, spin.casimir() - m * (m + 1.0)));
}

// Amplitude of sigma^-_j U_{j,j+1} sigma^-_{j+1} on a link currently at m.
inline double hopping_amplitude(const ModelSpec& model, int twice_m) {
  if (model.kind == ModelKind::tsm) return 0.5 * model.J;
  return model.J / (2.0 * std::sqrt(model.spin.casimir())) * spin_raise_element(model.spin, twice_m);
}

inline SparseHamiltonian build_hamiltonian(const PhysicalBasis& basis, const ModelSpec& model) {
  const int L = basis.length();
  const int ts = basis.spin().twice();
  const std::size_t dim = basis.size();
  std::vector<double> diagonal(dim, 0.0);
  std::vector<OffDiagonalEntry> upper;
  const double half_k2 = 0.5 * model.kappa * model.kappa;

  for (std::size_t b = 0; b < dim; ++b) {
    const auto links = basis.twice_links(b);
    const auto mask = basis.occupation_mask(b);
    double sigma_sum = 0.0;
    double flux_sq = 0.0;
    for (int j = 0; j < L; ++j) {
      sigma_sum += basis.occupied(b, j) ? 1.0 : -1.0;
      const double l = 0.5 * links[static_cast<std::size_t>(j)];
      flux_sq += l * l;
    }
    diagonal[b] = model.mu * sigma_sum + half_k2 * flux_sq;

    // Pair annihilation on (j, j+1) raising link j; the conjugate term is the transpose.
    for (int j = 0; j < L; ++j) {
      const int k = (j + 1) % L;
      const int twice_m = links[static_cast<std::size_t>(j)];
      if (!basis.occupied(b, j) || !basis.occupied(b, k) || twice_m + 2 > ts) continue;
      const auto new_mask = mask & ~(std::uint64_t{1} << static_cast<unsigned>(L - 1 - j)) &
                            ~(std::uint64_t{1} << static_cast<unsigned>(L - 1 - k));
      const int new_first = (j == 0) ? links[0] + 2 : links[0];
      const auto target = basis.find_key(basis.key_of(new_first, new_mask));
      if (!target) {
        throw std::logic_error("Hamiltonian term leaves the physical sector (basis state " + std::to_string(b) +
                               ", link " + std::to_string(j) + ")");
      }
      const double amp = hopping_amplitude(model, twice_m);
      if (amp == 0.0) continue;
      upper.push_back({std::min(b, *target), std::max(b, *target), amp});
    }
  }

  // Coincident terms are summed (only possible for L = 2, where two links join the same pair).
  std::sort(upper.begin(), upper.end(), [](const auto& a, const auto& c) {
    return a.row != c.row ? a.row < c.row : a.col < c.col;
  });
  std::vector<OffDiagonalEntry> merged;
  for (const auto& e : upper) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  return SparseHamiltonian(model, std::move(diagonal), std::move(merged));
}

}  // namespace detail

// Quantum link model with spin-S gauge links.
inline SparseHamiltonian build_qlm(const PhysicalBasis& basis) {
  if (basis.model().kind != ModelKind::qlm) throw std::invalid_argument("build_qlm: basis model kind is not qlm");
  return detail::build_hamiltonian(basis, basis.model());
}

// Truncated Schwinger model: unit raising amplitude on the links, same diagonal.
inline SparseHamiltonian build_tsm(const PhysicalBasis& basis) {
  if (basis.model().kind != ModelKind::tsm) throw std::invalid_argument("build_tsm: basis model kind is not tsm");
  return detail::build_hamiltonian(basis, basis.model());
}

inline SparseHamiltonian build_hamiltonian(const PhysicalBasis& basis) {
  return basis.model().kind == ModelKind::qlm ? build_qlm(basis) : build_tsm(basis);
}

inline std::vector<Complex> apply(const SparseHamiltonian& h, std::span<const Complex> v) {
  return h.apply<Complex>(v);
}

// <v|H|v> for a complex vector; real because H is symmetric.
inline Complex expectation(const SparseHamiltonian& h, std::span<const Complex> v) {
  const auto hv = h.apply<Complex>(v);
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) acc += std::conj(v[i]) * hv[i];
  return acc;
}

// Debug dump: "row col value" per line, diagonal entries then the upper triangle.
inline void write_triplets(const SparseHamiltonian& h, std::ostream& os) {
  os << "# dim " << h.dim() << " upper-triangle triplets, symmetric\n";
  for (std::size_t r = 0; r < h.dim(); ++r) {
    if (h.diagonal()[r] != 0.0) os << r << ' ' << r << ' ' << format_double(h.diagonal()[r]) << '\n';
  }
  for (const auto& e : h.upper()) os << e.row << ' ' << e.col << ' ' << format_double(e.value) << '\n';
}

}  // namespace qlm
