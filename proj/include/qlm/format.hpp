#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace qlm {

// 17 significant digits, locale independent; non-finite values print as "inf", "-inf", "nan".
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace qlm
