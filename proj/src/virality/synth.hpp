// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "virality/ingest.hpp"

namespace virality::synth {

/// Where early-observable class signal is planted. Engagement outcome always
/// follows the planted label.
enum class SignalPlacement { Temporal, Network, Static, Mixed };

std::string_view to_string(SignalPlacement p) noexcept;
std::optional<SignalPlacement> placement_from_string(std::string_view s) noexcept;

struct SynthConfig {
  std::size_t n_posts = 1000;
  double viral_frac = 0.05;
  SignalPlacement placement = SignalPlacement::Temporal;
  std::int64_t min_subscribers = 100'000;
  std::int64_t max_subscribers = 5'000'000;

  // Viral trajectories (normalized units per 100k subscribers).
  double viral_plateau_median = 800.0;
  double viral_plateau_sigma = 0.3;
  double takeoff_mean = 29.0;
  double takeoff_sd = 8.0;
  double peak_mean = 456.0;
  double peak_sd = 90.0;

  // Non-viral trajectories.
  double nonviral_plateau_median = 15.0;
  double nonviral_plateau_sigma = 0.6;
  double nonviral_rate_min = 0.03, nonviral_rate_max = 0.08;

  /// Scales every log-normal spread; 0 gives noiseless plateaus.
  double noise_scale = 1.0;
  double tracking_minutes = 1440.0;
  /// Probability that any one static field is left out of the blob.
  double static_missing_rate = 0.05;
  std::int64_t start_utc = 1704067200;  ///< 2024-01-01T00:00:00Z
  double mean_gap_minutes = 20.0;
  std::uint64_t seed = 0;
};

/// Throws Config on invalid settings.
void validate_config(const SynthConfig& c);

struct SynthCorpus {
  std::vector<PostRecord> records;
  std::vector<int> planted;  ///< aligned with records
};

/// Exactly llround(viral_frac * n_posts) planted positives.
SynthCorpus generate(const SynthConfig& config);

/// Snapshot grid of the collector's default schedule up to `horizon`.
std::vector<double> default_poll_grid(double horizon_minutes);

nlohmann::json to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j);

}  // namespace virality::synth
