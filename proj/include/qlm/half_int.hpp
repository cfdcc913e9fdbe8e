#pragma once

#include <charconv>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qlm {

// An exact element of (1/2)Z, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;

  static constexpr HalfInt from_twice(int twice) noexcept {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  static constexpr HalfInt from_int(int value) noexcept { return from_twice(2 * value); }

  // Accepts "3/2", "-1/2", "1", "0", "1.5", "-0.5".
  static HalfInt parse(std::string_view text);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const noexcept { return from_twice(-twice_); }
  constexpr HalfInt abs() const noexcept { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  constexpr auto operator<=>(const HalfInt&) const = default;

  // Exact fraction form: "3/2", "-1/2", "1", "0".
  std::string to_string() const {
    if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

inline HalfInt HalfInt::parse(std::string_view text) {
  const std::string original(text);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    int num = 0;
    int den = 0;
    if (!detail::parse_int(text.substr(0, slash), num) ||
        !detail::parse_int(text.substr(slash + 1), den) || (den != 1 && den != 2)) {
      throw std::invalid_argument("not a half-integer: '" + original + "'");
    }
    return from_twice(den == 1 ? 2 * num : num);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
    std::string_view whole = text.substr(0, dot);
    const bool negative = !whole.empty() && whole.front() == '-';
    int w = 0;
    if (whole == "-" || whole.empty() || whole == "+") {
      w = 0;
    } else if (!detail::parse_int(whole, w)) {
      throw std::invalid_argument("not a half-integer: '" + original + "'");
    }
    int twice = 2 * w;
    if (frac == "5") {
      twice += negative ? -1 : 1;
    } else if (!frac.empty()) {
      throw std::invalid_argument("not a half-integer: '" + original + "'");
    }
    return from_twice(twice);
  }

  int v = 0;
  if (!detail::parse_int(text, v)) {
    throw std::invalid_argument("not a half-integer: '" + original + "'");
  }
  return from_int(v);
}

}  // namespace qlm
