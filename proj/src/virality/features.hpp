// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "virality/catalog.hpp"
#include "virality/common.hpp"
#include "virality/ingest.hpp"
#include "virality/normalize.hpp"

namespace virality::features {

/// Observation window: only snapshots with t <= minutes are visible.
struct WindowSpec {
  double minutes;

  explicit WindowSpec(double m);
};

inline constexpr double kSweepWindows[] = {30, 60, 120, 180, 240, 300, 360, 420};

/// Snapshots with t_minutes <= w.minutes, order preserved.
std::vector<EngagementSnapshot> window_view(const PostRecord& r, WindowSpec w);

/// Time-series and submission-time features over one window.
struct TemporalFeatures {
  double hour_of_day = 0;
  double day_of_week = 0;  ///< Monday = 0
  double is_weekend = 0;
  double window_minutes = 0;

  MaybeDouble norm_score, norm_num_comments, norm_num_crossposts;
  MaybeDouble peak_velocity, takeoff_velocity, peak_acceleration, min_acceleration;
  MaybeDouble engagement_auc;
  MaybeDouble burst_count;
  MaybeDouble momentum_ratio;
  MaybeDouble half_life_minutes;
  MaybeDouble slope_5min, slope_10min;
  MaybeDouble time_to_peak, time_to_takeoff;
  MaybeDouble timing_entropy;
  MaybeDouble first_vote_min, first_comm_min, first_cross_min;
  MaybeDouble time_in_new, time_in_rising, time_in_hot, time_in_top;
  MaybeDouble pct_time_in_new, pct_time_in_rising, pct_time_in_hot, pct_time_in_top;
  MaybeDouble transitions_within;
  MaybeDouble upvote_ratio;
  std::optional<std::string> category_snapshot;
};

/// Number of equal-width bins used for timing entropy.
inline constexpr int kEntropyBins = 6;

TemporalFeatures extract_temporal(const PostRecord& r, WindowSpec w, const NormalizationCaps& caps);

/// Author context and listing-category path within the window.
struct NetworkFeatures {
  double author_account_age_days = 0;
  double author_is_premium = 0;
  double author_karma_per_day = 0;
  double author_total_karma = 0;
  double category_transitions = 0;
  MaybeDouble category_stability;
  double unique_categories = 0;
  MaybeDouble promotion_demotion_ratio;
  std::string progression_pattern;  ///< none | static | ascending | descending | mixed
  MaybeDouble pct_time_in_new;
  MaybeDouble time_to_hot, time_to_rising, time_to_top;
};

NetworkFeatures extract_network(const PostRecord& r, WindowSpec w);

// ---------------------------------------------------------------------------
// Tabular assembly

using FeatureValue = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const FeatureValue& v) noexcept { return std::holds_alternative<std::monostate>(v); }

struct ColumnDescriptor {
  std::string name;
  Modality modality;
  ColumnKind kind;

  bool operator==(const ColumnDescriptor&) const = default;
};

/// Rectangular table of mixed numeric/categorical cells, one row per post.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<ColumnDescriptor> columns;
  std::vector<std::vector<FeatureValue>> rows;

  std::size_t n_rows() const noexcept { return row_ids.size(); }
  std::size_t n_cols() const noexcept { return columns.size(); }
  /// Rows selected by index, same columns.
  FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const;
  /// Columns whose modality is in `keep`, same rows.
  FeatureMatrix select_modalities(const std::set<Modality>& keep) const;
  /// Throws Schema if not rectangular or names repeat.
  void check_shape() const;
};

/// All columns produced for the given modalities, ordered by (modality, name).
std::vector<ColumnDescriptor> column_layout(const std::set<Modality>& include);

/// Static content values for one record in catalog order, with title-derived
/// fields filled in when absent from the blob.
std::vector<std::pair<StaticField, FeatureValue>> extract_static(const PostRecord& r);

/// One row per record, columns restricted to `include`.
FeatureMatrix assemble_matrix(const std::vector<PostRecord>& records, WindowSpec w, const NormalizationCaps& caps,
                              const std::set<Modality>& include);

std::set<Modality> all_modalities();

/// Writes `<csv>` (post_id + one column per feature, empty cell = missing) and
/// `<manifest>` (name,modality,kind).
void export_matrix(const FeatureMatrix& m, const std::filesystem::path& csv, const std::filesystem::path& manifest);
FeatureMatrix import_matrix(const std::filesystem::path& csv, const std::filesystem::path& manifest);

}  // namespace virality::features
