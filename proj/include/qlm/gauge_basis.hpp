#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qlm/half_int.hpp"
#include "qlm/model.hpp"

namespace qlm {

// One configuration of the periodic chain. Sites and links are 0-based; link k
// joins site k and site k+1 (mod L). Link values are stored as 2*s^z.
struct BasisState {
  std::vector<std::uint8_t> occupation;  // n_j = (sigma^z_j + 1) / 2
  std::vector<int> twice_links;

  int length() const noexcept { return static_cast<int>(occupation.size()); }
  bool operator==(const BasisState&) const = default;
};

// G_j restricted to a single configuration, with the 1-based staggering
// (-1)^j of the Gauss-law generator: site index s here is j = s + 1.
inline int gauss_charge(const BasisState& state, int site) {
  const int L = state.length();
  if (site < 0 || site >= L || static_cast<int>(state.twice_links.size()) != L) {
    throw std::invalid_argument("gauss_charge: site " + std::to_string(site) + " out of range for L = " +
                                std::to_string(L));
  }
  const int left = state.twice_links[static_cast<std::size_t>((site + L - 1) % L)];
  const int right = state.twice_links[static_cast<std::size_t>(site)];
  const int charge = (left + right) / 2 + state.occupation[static_cast<std::size_t>(site)];
  return (site % 2 == 0) ? -charge : charge;
}

inline bool satisfies_gauss_law(const BasisState& state) {
  for (int s = 0; s < state.length(); ++s) {
    if (gauss_charge(state, s) != 0) return false;
  }
  return true;
}

// Cyclic shift by `shift` sites: site s of the result holds site s + shift of the input.
inline BasisState translated(const BasisState& state, int shift) {
  const int L = state.length();
  BasisState out{std::vector<std::uint8_t>(state.occupation.size()), std::vector<int>(state.twice_links.size())};
  for (int s = 0; s < L; ++s) {
    const auto src = static_cast<std::size_t>(((s + shift) % L + L) % L);
    out.occupation[static_cast<std::size_t>(s)] = state.occupation[src];
    out.twice_links[static_cast<std::size_t>(s)] = state.twice_links[src];
  }
  return out;
}

// The g_j = 0 sector, in canonical order: first link value ascending, then the
// occupation string read as a big-endian integer (site 0 most significant).
// Immutable once built.
class PhysicalBasis {
 public:
  using Key = std::uint64_t;

  const ModelSpec& model() const noexcept { return model_; }
  const SpinValue& spin() const noexcept { return model_.spin; }
  int length() const noexcept { return model_.length; }
  std::size_t size() const noexcept { return keys_.size(); }

  std::span<const std::int8_t> twice_links(std::size_t index) const {
    return {links_.data() + index * static_cast<std::size_t>(length()), static_cast<std::size_t>(length())};
  }
  std::uint64_t occupation_mask(std::size_t index) const noexcept { return masks_[index]; }
  bool occupied(std::size_t index, int site) const noexcept {
    return ((masks_[index] >> static_cast<unsigned>(length() - 1 - site)) & 1U) != 0;
  }

  BasisState state(std::size_t index) const {
    BasisState s;
    s.occupation.resize(static_cast<std::size_t>(length()));
    s.twice_links.resize(static_cast<std::size_t>(length()));
    auto links = twice_links(index);
    for (int j = 0; j < length(); ++j) {
      s.occupation[static_cast<std::size_t>(j)] = occupied(index, j) ? 1 : 0;
      s.twice_links[static_cast<std::size_t>(j)] = links[static_cast<std::size_t>(j)];
    }
    return s;
  }

  // A configuration is fixed by its first link and its occupation string.
  Key key_of(int twice_first_link, std::uint64_t mask) const noexcept {
    const auto offset = static_cast<Key>((twice_first_link + spin().twice()) / 2);
    return (offset << static_cast<unsigned>(length())) | mask;
  }

  std::optional<std::size_t> find_key(Key key) const noexcept {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - keys_.begin());
  }

  std::optional<std::size_t> find(const BasisState& s) const {
    if (s.length() != length() || static_cast<int>(s.twice_links.size()) != length()) return std::nullopt;
    const auto index = find_key(key_of(s.twice_links[0], mask_of(s.occupation)));
    if (!index || state(*index) != s) return std::nullopt;
    return index;
  }

  static std::uint64_t mask_of(std::span<const std::uint8_t> occupation) noexcept {
    std::uint64_t m = 0;
    for (auto n : occupation) m = (m << 1U) | (n != 0 ? 1U : 0U);
    return m;
  }

  friend PhysicalBasis enumerate_basis(const ModelSpec& model);

 private:
  explicit PhysicalBasis(ModelSpec model) : model_(std::move(model)) {}

  ModelSpec model_;
  std::vector<Key> keys_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::int8_t> links_;  // size() * L, row-major
};

// Seeded recursion: fix the first link, walk sites 1..L-1 with
// l_j = -l_{j-1} - n_j, and let the closure at site 0 fix n_0.
inline PhysicalBasis enumerate_basis(const ModelSpec& model) {
  model.validate();
  PhysicalBasis basis(model);
  const int L = model.length;
  const int ts = model.spin.twice();

  struct Candidate {
    PhysicalBasis::Key key;
    std::uint64_t mask;
    std::vector<std::int8_t> links;
  };
  std::vector<Candidate> found;
  std::vector<std::int8_t> links(static_cast<std::size_t>(L));
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L));

  auto recurse = [&](auto&& self, int site) -> void {
    if (site == L) {
      const int closure = -(links[static_cast<std::size_t>(L - 1)] + links[0]);  // 2 * n_0
      if (closure != 0 && closure != 2) return;
      occ[0] = static_cast<std::uint8_t>(closure / 2);
      const auto mask = PhysicalBasis::mask_of(occ);
      found.push_back({basis.key_of(links[0], mask), mask, links});
      return;
    }
    for (int n = 0; n <= 1; ++n) {
      const int next = -links[static_cast<std::size_t>(site - 1)] - 2 * n;
      if (next < -ts || next > ts) continue;
      occ[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(n);
      links[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(next);
      self(self, site + 1);
    }
  };

  for (int first = -ts; first <= ts; first += 2) {
    links[0] = static_cast<std::int8_t>(first);
    recurse(recurse, 1);
  }

  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.key < b.key; });
  basis.keys_.reserve(found.size());
  basis.masks_.reserve(found.size());
  basis.links_.reserve(found.size() * static_cast<std::size_t>(L));
  for (const auto& c : found) {
    basis.keys_.push_back(c.key);
    basis.masks_.push_back(c.mask);
    basis.links_.insert(basis.links_.end(), c.links.begin(), c.links.end());
  }
  return basis;
}

// Empty matter with links alternating (m_z, -m_z, ...); the first link carries +m_z.
inline BasisState vacuum_configuration(const SpinValue& spin, int length, HalfInt mz) {
  if (!spin.admits(mz)) {
    throw std::invalid_argument("vacuum m_z = " + mz.to_string() + " is not valid for spin S = " +
                                spin.value().to_string());
  }
  BasisState s{std::vector<std::uint8_t>(static_cast<std::size_t>(length), 0),
               std::vector<int>(static_cast<std::size_t>(length))};
  for (int k = 0; k < length; ++k) s.twice_links[static_cast<std::size_t>(k)] = (k % 2 == 0) ? mz.twice() : -mz.twice();
  return s;
}

inline std::size_t vacuum_state(const PhysicalBasis& basis, HalfInt mz) {
  auto index = basis.find(vacuum_configuration(basis.spin(), basis.length(), mz));
  if (!index) throw std::logic_error("vacuum m_z = " + mz.to_string() + " missing from basis");
  return *index;
}

// All vacuum labels, m_z = S, S-1, ..., -S.
inline std::vector<HalfInt> vacuum_labels(const SpinValue& spin) {
  std::vector<HalfInt> labels;
  for (int t = spin.twice(); t >= -spin.twice(); t -= 2) labels.push_back(HalfInt::from_twice(t));
  return labels;
}

}  // namespace qlm
