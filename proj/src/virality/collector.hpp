// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "virality/ingest.hpp"

namespace virality::collector {

struct PollTier {
  double max_age_minutes;
  double interval_minutes;
};

/// Age-tiered polling intervals. Tiers are strictly increasing in age and
/// intervals are positive and non-decreasing.
class PollSchedule {
 public:
  explicit PollSchedule(std::vector<PollTier> tiers);

  /// 5 min up to 2 h, 15 min up to 8 h, 60 min up to 24 h.
  static PollSchedule default_schedule();

  const std::vector<PollTier>& tiers() const noexcept { return tiers_; }

 private:
  std::vector<PollTier> tiers_;
};

/// Interval of the first tier whose max age exceeds `post_age_minutes`; the
/// last interval persists beyond the final tier.
double schedule_next_poll(double post_age_minutes, const PollSchedule& schedule);

// ---------------------------------------------------------------------------
// Transport

struct FetchResult {
  std::int64_t score = 0;
  std::int64_t comments = 0;
  std::int64_t crossposts = 0;
  std::optional<double> upvote_ratio;
  Category category = Category::Unknown;
  bool removed = false;
};

/// Retryable failure (network hiccup, 5xx, rate limiting).
class TransientError : public std::runtime_error {
 public:
  explicit TransientError(const std::string& what, std::optional<double> retry_after_seconds = std::nullopt)
      : std::runtime_error(what), retry_after_seconds(retry_after_seconds) {}
  std::optional<double> retry_after_seconds;
};

/// The post can never be fetched again (deleted, 404).
class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PostSource {
 public:
  virtual ~PostSource() = default;
  virtual FetchResult fetch(const std::string& post_id) = 0;
  /// False if the tracker must serialize calls across posts.
  virtual bool thread_safe() const { return false; }
};

/// Time since a post's creation. Injected so tests run on simulated time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_minutes() = 0;
  virtual void sleep_minutes(double minutes) = 0;
};

class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(double start_minutes = 0.0) : now_(start_minutes) {}
  double now_minutes() override { return now_; }
  void sleep_minutes(double minutes) override {
    if (minutes > 0) now_ += minutes;
  }

 private:
  double now_;
};

/// Wall clock measuring minutes since `created_epoch_seconds`.
class SystemClock final : public Clock {
 public:
  explicit SystemClock(double created_epoch_seconds) : created_(created_epoch_seconds) {}
  double now_minutes() override;
  void sleep_minutes(double minutes) override;

 private:
  double created_;
};

/// Replays recorded responses keyed by (post_id, age). A request at age t is
/// answered by the latest recorded response with age <= t; a post with no
/// response yet is unavailable.
class FileReplaySource final : public PostSource {
 public:
  struct Entry {
    double t_minutes;
    FetchResult result;
  };

  /// `age_of` supplies the current age of a post at fetch time.
  FileReplaySource(std::map<std::string, std::vector<Entry>> entries,
                   std::function<double(const std::string&)> age_of);

  /// Line-delimited JSON: {"post_id", "t_minutes", "score", "comments",
  /// "crossposts", "upvote_ratio"?, "category", "removed"?}.
  static std::map<std::string, std::vector<Entry>> load(const std::filesystem::path& path);

  FetchResult fetch(const std::string& post_id) override;

 private:
  std::map<std::string, std::vector<Entry>> entries_;
  std::function<double(const std::string&)> age_of_;
};

/// Polls `GET <base_url>/posts/<id>` for a JSON body matching FetchResult.
/// 429/503 honour Retry-After; 404/410 are permanent; other errors transient.
class HttpPostSource final : public PostSource {
 public:
  struct Options {
    std::string base_url;                      ///< e.g. "http://127.0.0.1:8080"
    std::string auth_header;                   ///< passed through verbatim as Authorization
    double timeout_seconds = 10.0;
    std::string path_prefix = "/posts/";
  };

  explicit HttpPostSource(Options opts);
  FetchResult fetch(const std::string& post_id) override;
  bool thread_safe() const override { return true; }

 private:
  Options opts_;
};

FetchResult fetch_result_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FetchResult& r);

// ---------------------------------------------------------------------------
// Tracking

enum class Termination { Completed, Removed, Unreachable };

std::string_view to_string(Termination t) noexcept;

struct RetryPolicy {
  int max_retries = 3;
  double base_delay_seconds = 1.0;  ///< delays are base * 2^attempt
};

struct TrackResult {
  std::string post_id;
  std::vector<EngagementSnapshot> snapshots;
  Termination reason = Termination::Completed;
  std::size_t failed_polls = 0;
};

/// Polls one post from age 0 until `until_minutes`. Failed polls are skipped,
/// never fabricated. Snapshots carry the age at which the response arrived.
TrackResult track_post(PostSource& source, const std::string& post_id, double until_minutes,
                       const PollSchedule& schedule, Clock& clock, const RetryPolicy& retry = {});

/// Tracks several posts on `jobs` threads, one in-flight request per post.
/// Sources that are not thread-safe are called under a shared lock.
/// `make_clock` yields an independent clock per post.
std::vector<TrackResult> track_posts(PostSource& source, const std::vector<std::string>& post_ids,
                                     double until_minutes, const PollSchedule& schedule,
                                     const std::function<std::unique_ptr<Clock>(const std::string&)>& make_clock,
                                     unsigned jobs, const RetryPolicy& retry = {});

nlohmann::json to_json(const TrackResult& r);

}  // namespace virality::collector
