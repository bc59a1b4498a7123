#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace liesim {

// Shortest decimal form that round-trips, locale independent.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Ceiling with a 1e-12 relative snap: values that sit an ulp above an integer
// because of floating noise round to that integer instead of the next one.
inline std::int64_t checked_ceil(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("checked_ceil: non-finite value");
  double snapped = std::ceil(x - 1e-12 * std::max(1.0, std::fabs(x)));
  if (snapped > 9.1e18) throw std::overflow_error("checked_ceil: value exceeds int64 range");
  return static_cast<std::int64_t>(snapped);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace liesim
