#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qlm/half_int.hpp"

namespace qlm {

// Link spin S. Stored as 2S so that integer and half-integer spins are exact.
class SpinValue {
 public:
  static constexpr int max_twice = 20;

  explicit SpinValue(int twice_s) : twice_s_(twice_s) {
    if (twice_s < 1 || twice_s > max_twice) {
      throw std::invalid_argument("spin must satisfy 1/2 <= S <= " + std::to_string(max_twice / 2) +
                                  ", got 2S = " + std::to_string(twice_s));
    }
  }

  static SpinValue from(HalfInt s) { return SpinValue(s.twice()); }

  int twice() const noexcept { return twice_s_; }
  HalfInt value() const noexcept { return HalfInt::from_twice(twice_s_); }
  double as_double() const noexcept { return 0.5 * twice_s_; }
  int link_dim() const noexcept { return twice_s_ + 1; }
  bool is_integer() const noexcept { return twice_s_ % 2 == 0; }
  // S(S+1)
  double casimir() const noexcept { return as_double() * (as_double() + 1.0); }

  // True if m is one of -S, -S+1, ..., S.
  bool admits(HalfInt m) const noexcept {
    return m.abs().twice() <= twice_s_ && (m.twice() - twice_s_) % 2 == 0;
  }

  bool operator==(const SpinValue&) const = default;

 private:
  int twice_s_;
};

enum class ModelKind { qlm, tsm };

inline std::string_view to_string(ModelKind kind) { return kind == ModelKind::qlm ? "qlm" : "tsm"; }

inline ModelKind parse_model_kind(std::string_view text) {
  if (text == "qlm" || text == "QLM") return ModelKind::qlm;
  if (text == "tsm" || text == "TSM") return ModelKind::tsm;
  throw std::invalid_argument("unknown model kind '" + std::string(text) + "' (expected qlm or tsm)");
}

// One quench experiment: chain, couplings, and the vacuum the system starts in.
struct ModelSpec {
  SpinValue spin{1};
  int length = 4;  // matter sites = links, periodic
  double J = 1.0;
  double mu = 0.0;
  double kappa = 0.0;
  ModelKind kind = ModelKind::qlm;
  HalfInt initial_mz = HalfInt::from_twice(1);

  static constexpr int max_length = 40;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const {
    if (length < 2 || length % 2 != 0) {
      throw std::invalid_argument("chain length must be even and >= 2, got " + std::to_string(length));
    }
    if (length > max_length) {
      throw std::invalid_argument("chain length " + std::to_string(length) + " exceeds the supported maximum " +
                                  std::to_string(max_length));
    }
    if (!spin.admits(initial_mz)) {
      throw std::invalid_argument("initial vacuum m_z = " + initial_mz.to_string() +
                                  " is not a valid value for spin S = " + spin.value().to_string());
    }
    if (!std::isfinite(J) || !std::isfinite(mu) || !std::isfinite(kappa)) {
      throw std::invalid_argument("couplings must be finite");
    }
  }

  // Below this the two-site unit cell is not repeated and results are oracle-only.
  bool below_physical_size() const noexcept { return length < 4; }
};

}  // namespace qlm
