// Copyright 2026 The FlashGate Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <string>

namespace flashgate::csv {

// Shortest round-trip form, '.' separator regardless of the global locale.
inline std::string number(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

// Fixed-point with `decimals` digits, locale-independent.
inline std::string fixed(double value, int decimals) {
  char buf[64];
  const auto [end, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

}  // namespace flashgate::csv
