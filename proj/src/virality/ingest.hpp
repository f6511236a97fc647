// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace virality {

enum class Category { New, Rising, Hot, Top, Unknown };
enum class MediaType { Image, Video, Gif, Text, Audio };
enum class LanguageGroup { English, German, Turkish, Nordic, French, Spanish, Portuguese, Italian };

std::string_view to_string(Category c) noexcept;
std::string_view to_string(MediaType m) noexcept;
std::string_view to_string(LanguageGroup g) noexcept;
std::optional<Category> category_from_string(std::string_view s) noexcept;
std::optional<MediaType> media_type_from_string(std::string_view s) noexcept;
std::optional<LanguageGroup> language_group_from_string(std::string_view s) noexcept;

/// Ordinal rank in the listing ladder new < rising < hot < top; Unknown has none.
std::optional<int> category_rank(Category c) noexcept;

/// One timestamped observation of a post's engagement.
struct EngagementSnapshot {
  double t_minutes = 0.0;  ///< minutes since post creation
  std::int64_t score = 0;
  std::int64_t comments = 0;
  std::int64_t crossposts = 0;
  std::optional<double> upvote_ratio;
  Category category = Category::Unknown;

  bool operator==(const EngagementSnapshot&) const = default;
};

struct AuthorInfo {
  std::int64_t total_karma = 0;
  double account_age_days = 0.0;
  bool is_premium = false;

  bool operator==(const AuthorInfo&) const = default;
};

struct SubredditInfo {
  std::string name;
  std::int64_t subscribers = 1;
  LanguageGroup language_group = LanguageGroup::English;

  bool operator==(const SubredditInfo&) const = default;
};

/// Values of the precomputed content blob. Integers are carried as doubles.
using StaticValue = std::variant<bool, double, std::string>;
using StaticBlob = std::map<std::string, StaticValue>;

struct PostRecord {
  std::string post_id;
  std::int64_t created_utc = 0;  ///< seconds since the Unix epoch, UTC
  std::string title;
  AuthorInfo author;
  SubredditInfo subreddit;
  MediaType media_type = MediaType::Image;
  std::string media_url;
  bool removed = false;
  std::vector<EngagementSnapshot> snapshots;
  std::optional<StaticBlob> static_features;

  bool operator==(const PostRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Timestamps

/// Parses "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)". Throws Parse on anything else.
std::int64_t parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

// ---------------------------------------------------------------------------
// Serialization (one JSON object per line)

nlohmann::json to_json(const PostRecord& r);
/// Throws Parse with a field path on any schema violation.
PostRecord record_from_json(const nlohmann::json& j);

std::string serialize_record(const PostRecord& r);
void write_dataset(const std::filesystem::path& path, const std::vector<PostRecord>& records);

struct Diagnostic {
  std::size_t line = 0;  ///< 1-based line number
  std::string message;
};

/// Streams records from line-delimited text. Malformed lines produce a
/// diagnostic and are skipped; blank lines are ignored.
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in) : in_(in) {}

  /// Next valid record, or nullopt at end of input.
  std::optional<PostRecord> next();
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::vector<Diagnostic> diagnostics_;
};

struct ParseResult {
  std::vector<PostRecord> records;
  std::vector<Diagnostic> diagnostics;
};

/// Reads a whole dataset file. Throws Io if the file cannot be opened.
ParseResult parse_dataset(const std::filesystem::path& path);
ParseResult parse_dataset(std::istream& in);

// ---------------------------------------------------------------------------
// Validation

enum class ViolationCode {
  EmptyPostId,
  EmptySnapshots,
  NegativeTime,
  NonIncreasingTime,
  NegativeComments,
  NegativeCrossposts,
  UpvoteRatioOutOfRange,
  SubscribersBelowOne,
  NegativeAccountAge,
  NonFiniteValue,
  UnknownStaticField,
  StaticFieldType,
  DuplicatePostId,
};

struct Violation {
  ViolationCode code;
  std::optional<std::size_t> index;  ///< snapshot index where applicable
  std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Checks every type invariant of a record. Monotonicity reports only the
/// first offending snapshot index.
ValidationReport validate_record(const PostRecord& r);

/// Per-record reports keyed by post_id, plus duplicate-id violations.
std::map<std::string, ValidationReport> validate_dataset(const std::vector<PostRecord>& records);

// ---------------------------------------------------------------------------
// Quality filters

struct FilterOptions {
  double min_tracking_minutes = 1440.0;
  /// Longest tolerated silence between consecutive snapshots ("continuous").
  double max_gap_minutes = 360.0;
};

enum class FilterReason { Removed, NoMedia, NoSnapshots, ShortTracking, TrackingGap };

std::string_view to_string(FilterReason r) noexcept;

struct FilterSummary {
  std::size_t raw = 0;
  std::size_t removed = 0;
  std::size_t no_media = 0;
  std::size_t no_snapshots = 0;
  std::size_t short_tracking = 0;
  std::size_t tracking_gap = 0;
  std::size_t kept = 0;

  bool operator==(const FilterSummary&) const = default;
};

nlohmann::json to_json(const FilterSummary& s);

/// First failing filter for a record, or nullopt if it is kept.
std::optional<FilterReason> filter_reason(const PostRecord& r, const FilterOptions& opts = {});

std::vector<PostRecord> apply_quality_filters(std::vector<PostRecord> records, const FilterOptions& opts = {},
                                              FilterSummary* summary = nullptr);

/// Dataset fingerprint: record count, creation-time range and sorted ids.
std::string dataset_fingerprint(const std::vector<PostRecord>& records);

}  // namespace virality
