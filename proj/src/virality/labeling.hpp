// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "virality/ingest.hpp"
#include "virality/models.hpp"
#include "virality/normalize.hpp"

namespace virality::labeling {

/// Per-metric 99th percentile (linear rule) of final raw/N * 1e5 over the
/// training posts. A zero percentile falls back to the observed maximum,
/// then to 1. Throws Fit on empty input.
NormalizationCaps fit_p99_caps(const std::vector<PostRecord>& train);

/// Engagement inputs of the hybrid score, keyed by name.
using EngagementFeatures = std::map<std::string, double>;

/// Keys used by the auxiliary forest and the hybrid score.
inline const std::vector<std::string> kLabelFeatureNames = {"score",         "comments",          "crossposts",
                                                            "peak_velocity", "peak_acceleration", "time_to_takeoff"};

/// Label features over the first `window_minutes` (missing values are 0).
EngagementFeatures window_engagement_features(const PostRecord& r, const NormalizationCaps& caps,
                                              double window_minutes);
/// Label features over the whole tracked series.
EngagementFeatures final_engagement_features(const PostRecord& r, const NormalizationCaps& caps);

/// Unweighted sum of normalized final score, comments and crossposts.
double preliminary_sum(const PostRecord& r, const NormalizationCaps& caps);

/// ceil(top_frac * n) positives, taken by descending sum, ties by ascending id.
std::vector<int> make_preliminary_target(const std::vector<double>& sums, const std::vector<std::string>& ids,
                                         double top_frac = 0.05);
std::vector<int> make_preliminary_target(const std::vector<PostRecord>& train, const NormalizationCaps& caps,
                                         double top_frac = 0.05);

struct HybridWeights {
  std::map<std::string, double> weights;
  std::vector<double> source_windows;

  bool operator==(const HybridWeights&) const = default;
};

/// score 1.0, comments 0.44, peak_velocity 0.14.
HybridWeights published_weights();

/// Max-normalized average forest importance over the given windows.
HybridWeights learn_hybrid_weights(const std::vector<PostRecord>& train, const NormalizationCaps& caps,
                                   const std::vector<double>& windows, const std::vector<int>& prelim,
                                   const models::ForestParams& forest = {});

/// Same, from a precomputed design matrix per window (columns named by `names`).
HybridWeights weights_from_matrices(const std::vector<models::Matrix>& per_window, const std::vector<std::string>& names,
                                    const std::vector<int>& prelim, const models::ForestParams& forest,
                                    std::vector<double> windows);

/// sum_k beta_k f_k. Throws Schema unless the key sets are equal.
double hybrid_score(const EngagementFeatures& f, const HybridWeights& w);
/// Restricts `f` to the weight keys before scoring.
double hybrid_score_subset(const EngagementFeatures& f, const HybridWeights& w);

struct ViralityThreshold {
  double tau = 0.0;
  double low = 0.0, high = 0.0;
  int iterations = 0;
  std::string fitted_on;

  bool operator==(const ViralityThreshold&) const = default;
};

/// Two-centroid 1-D K-Means started at the 10th and 90th percentiles; tau is
/// the centroid midpoint. Throws Degenerate when every value is equal.
ViralityThreshold fit_threshold(const std::vector<double>& scores, int max_iter = 200);

inline bool assign_label(double score, double tau) noexcept { return score >= tau; }

struct LabelingConfig {
  double top_frac = 0.05;
  std::vector<double> windows = {30, 60, 120};
  models::ForestParams forest;
  /// When set, weights are taken as given instead of learned.
  std::optional<HybridWeights> preset;
};

inline constexpr int kLabelingFormatVersion = 1;

struct LabelingArtifacts {
  NormalizationCaps caps;
  HybridWeights weights;
  ViralityThreshold threshold;
  std::string training_fingerprint;

  bool operator==(const LabelingArtifacts&) const = default;
};

/// Fits caps, weights and threshold on training records only.
LabelingArtifacts fit_labeling(const std::vector<PostRecord>& train, const LabelingConfig& config = {});

std::vector<double> hybrid_scores(const LabelingArtifacts& a, const std::vector<PostRecord>& records);
std::vector<int> apply_labeling(const LabelingArtifacts& a, const std::vector<PostRecord>& records);

nlohmann::json to_json(const HybridWeights& w);
HybridWeights weights_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LabelingArtifacts& a);
LabelingArtifacts artifacts_from_json(const nlohmann::json& j);
/// Deterministic text form (sorted keys, round-trip doubles).
std::string serialize(const LabelingArtifacts& a);

}  // namespace virality::labeling
