#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace lumamap::detail {

// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double value) {
  if (value == 0.0) {
    return "0";  // folds -0
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace lumamap::detail
