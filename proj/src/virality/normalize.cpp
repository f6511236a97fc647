// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "virality/common.hpp"

namespace virality {

double per_100k(std::int64_t raw, std::int64_t subscribers) {
  if (subscribers < 1) fail(ErrorKind::Domain, "subscribers < 1");
  return static_cast<double>(std::max<std::int64_t>(raw, 0)) / static_cast<double>(subscribers) * 100000.0;
}

double normalize_metric(std::int64_t raw, std::int64_t subscribers, double cap) {
  if (!(cap > 0) || !std::isfinite(cap)) fail(ErrorKind::Domain, "normalization cap must be positive and finite");
  return std::min(per_100k(raw, subscribers), cap);
}

nlohmann::json to_json(const NormalizationCaps& c) {
  return {{"score", c.score}, {"comments", c.comments}, {"crossposts", c.crossposts}};
}

NormalizationCaps caps_from_json(const nlohmann::json& j) {
  NormalizationCaps c;
  try {
    c.score = j.at("score").get<double>();
    c.comments = j.at("comments").get<double>();
    c.crossposts = j.at("crossposts").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed normalization caps: ") + e.what());
  }
  return c;
}

}  // namespace virality
