// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/common.hpp"

#include <bit>
#include <cstdio>

namespace virality {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Config: return "config";
    case ErrorKind::Split: return "split";
    case ErrorKind::Metric: return "metric";
    case ErrorKind::Fold: return "fold";
    case ErrorKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

Fnv1a& Fnv1a::update(std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
  // length terminator so ("ab","c") and ("a","bc") differ
  return update(static_cast<std::uint64_t>(bytes.size()));
}

Fnv1a& Fnv1a::update(std::uint64_t value) noexcept {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xffU;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Fnv1a& Fnv1a::update(double value) noexcept { return update(std::bit_cast<std::uint64_t>(value)); }

std::string Fnv1a::hex() const { return hex64(state_); }

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace virality
