// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>

#include <json.hpp>

namespace virality {

/// Engagement per 100k subscribers, before capping.
double per_100k(std::int64_t raw, std::int64_t subscribers);

/// min(max(raw, 0) / subscribers * 100000, cap). Throws Domain if
/// subscribers < 1 or the cap is not positive.
double normalize_metric(std::int64_t raw, std::int64_t subscribers, double cap);

/// Training-set P99 caps per engagement metric, in per-100k units.
struct NormalizationCaps {
  double score = 0.0;
  double comments = 0.0;
  double crossposts = 0.0;

  bool operator==(const NormalizationCaps&) const = default;
};

nlohmann::json to_json(const NormalizationCaps& c);
NormalizationCaps caps_from_json(const nlohmann::json& j);

}  // namespace virality
