// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/collector.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "virality/common.hpp"

namespace virality::collector {

using nlohmann::json;

PollSchedule::PollSchedule(std::vector<PollTier> tiers) : tiers_(std::move(tiers)) {
  if (tiers_.empty()) fail(ErrorKind::Config, "poll schedule has no tiers");
  for (std::size_t i = 0; i < tiers_.size(); ++i) {
    const auto& t = tiers_[i];
    if (!(t.interval_minutes > 0)) fail(ErrorKind::Config, "poll interval must be positive");
    if (i > 0) {
      if (!(t.max_age_minutes > tiers_[i - 1].max_age_minutes))
        fail(ErrorKind::Config, "poll tiers must be strictly increasing in age");
      if (t.interval_minutes < tiers_[i - 1].interval_minutes)
        fail(ErrorKind::Config, "poll intervals must be non-decreasing");
    }
  }
}

PollSchedule PollSchedule::default_schedule() { return PollSchedule({{120, 5}, {480, 15}, {1440, 60}}); }

double schedule_next_poll(double post_age_minutes, const PollSchedule& schedule) {
  if (!(post_age_minutes >= 0)) fail(ErrorKind::Domain, "post age must be non-negative");
  for (const auto& tier : schedule.tiers())
    if (tier.max_age_minutes > post_age_minutes) return tier.interval_minutes;
  return schedule.tiers().back().interval_minutes;
}

double SystemClock::now_minutes() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return (std::chrono::duration<double>(now).count() - created_) / 60.0;
}

void SystemClock::sleep_minutes(double minutes) {
  if (minutes > 0) std::this_thread::sleep_for(std::chrono::duration<double>(minutes * 60.0));
}

// ---------------------------------------------------------------------------

FetchResult fetch_result_from_json(const json& j) {
  FetchResult r;
  try {
    r.score = j.at("score").get<std::int64_t>();
    r.comments = j.at("comments").get<std::int64_t>();
    r.crossposts = j.at("crossposts").get<std::int64_t>();
    if (auto it = j.find("upvote_ratio"); it != j.end() && !it->is_null()) r.upvote_ratio = it->get<double>();
    if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
      const auto c = category_from_string(it->get<std::string>());
      if (!c) fail(ErrorKind::Parse, "unknown category '" + it->get<std::string>() + "'");
      r.category = *c;
    }
    if (auto it = j.find("removed"); it != j.end()) r.removed = it->get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed fetch response: ") + e.what());
  }
  return r;
}

json to_json(const FetchResult& r) {
  json j = {{"score", r.score},
            {"comments", r.comments},
            {"crossposts", r.crossposts},
            {"category", std::string(to_string(r.category))},
            {"removed", r.removed}};
  if (r.upvote_ratio) j["upvote_ratio"] = *r.upvote_ratio;
  return j;
}

FileReplaySource::FileReplaySource(std::map<std::string, std::vector<Entry>> entries,
                                   std::function<double(const std::string&)> age_of)
    : entries_(std::move(entries)), age_of_(std::move(age_of)) {
  for (auto& [id, list] : entries_)
    std::stable_sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) { return a.t_minutes < b.t_minutes; });
}

std::map<std::string, std::vector<FileReplaySource::Entry>> FileReplaySource::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open replay file '" + path.string() + "'");
  std::map<std::string, std::vector<Entry>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      out[j.at("post_id").get<std::string>()].push_back({j.at("t_minutes").get<double>(), fetch_result_from_json(j)});
    } catch (const std::exception& e) {
      fail(ErrorKind::Parse, "replay line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

FetchResult FileReplaySource::fetch(const std::string& post_id) {
  auto it = entries_.find(post_id);
  if (it == entries_.end()) throw UnavailableError("post '" + post_id + "' not in replay");
  const double age = age_of_(post_id);
  const Entry* best = nullptr;
  for (const auto& e : it->second) {
    if (e.t_minutes <= age + 1e-9)
      best = &e;
    else
      break;
  }
  if (!best) throw TransientError("no replayed response yet for '" + post_id + "'");
  return best->result;
}

HttpPostSource::HttpPostSource(Options opts) : opts_(std::move(opts)) {
  if (opts_.base_url.empty()) fail(ErrorKind::Config, "HTTP source needs a base URL");
}

FetchResult HttpPostSource::fetch(const std::string& post_id) {
  httplib::Client client(opts_.base_url);
  const auto secs = static_cast<time_t>(opts_.timeout_seconds);
  const auto usecs = static_cast<time_t>((opts_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  httplib::Headers headers;
  if (!opts_.auth_header.empty()) headers.emplace("Authorization", opts_.auth_header);

  auto res = client.Get(opts_.path_prefix + post_id, headers);
  if (!res) throw TransientError("request failed: " + httplib::to_string(res.error()));
  const int status = res->status;
  if (status == 404 || status == 410) throw UnavailableError("post '" + post_id + "' is gone (HTTP " + std::to_string(status) + ")");
  if (status == 429 || status == 503) {
    std::optional<double> retry_after;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw TransientError("rate limited (HTTP " + std::to_string(status) + ")", retry_after);
  }
  if (status != 200) throw TransientError("HTTP " + std::to_string(status));
  try {
    return fetch_result_from_json(json::parse(res->body));
  } catch (const json::exception& e) {
    throw TransientError(std::string("unparseable body: ") + e.what());
  } catch (const Error& e) {
    throw TransientError(e.what());
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::Removed: return "removed";
    case Termination::Unreachable: return "unreachable";
  }
  return "unknown";
}

namespace {

template <class Fetch>
TrackResult track_impl(Fetch&& fetch, const std::string& post_id, double until_minutes, const PollSchedule& schedule,
                       Clock& clock, const RetryPolicy& retry) {
  TrackResult out;
  out.post_id = post_id;
  double scheduled = 0.0;
  while (scheduled <= until_minutes + 1e-9) {
    clock.sleep_minutes(scheduled - clock.now_minutes());

    std::optional<FetchResult> got;
    for (int attempt = 0;; ++attempt) {
      try {
        got = fetch(post_id);
        break;
      } catch (const TransientError& e) {
        if (attempt >= retry.max_retries) break;
        const double delay_s = e.retry_after_seconds ? *e.retry_after_seconds
                                                     : retry.base_delay_seconds * std::pow(2.0, attempt);
        clock.sleep_minutes(delay_s / 60.0);
      } catch (const UnavailableError&) {
        out.reason = Termination::Unreachable;
        return out;
      }
    }

    if (got) {
      if (got->removed) {
        out.reason = Termination::Removed;
        return out;
      }
      const double t = clock.now_minutes();
      if (out.snapshots.empty() || t > out.snapshots.back().t_minutes) {
        out.snapshots.push_back({std::max(0.0, t), got->score, std::max<std::int64_t>(0, got->comments),
                                 std::max<std::int64_t>(0, got->crossposts), got->upvote_ratio, got->category});
      }
    } else {
      ++out.failed_polls;
    }
    scheduled += schedule_next_poll(scheduled, schedule);
  }
  out.reason = out.snapshots.empty() && out.failed_polls > 0 ? Termination::Unreachable : Termination::Completed;
  return out;
}

}  // namespace

TrackResult track_post(PostSource& source, const std::string& post_id, double until_minutes,
                       const PollSchedule& schedule, Clock& clock, const RetryPolicy& retry) {
  return track_impl([&](const std::string& id) { return source.fetch(id); }, post_id, until_minutes, schedule, clock,
                    retry);
}

std::vector<TrackResult> track_posts(PostSource& source, const std::vector<std::string>& post_ids,
                                     double until_minutes, const PollSchedule& schedule,
                                     const std::function<std::unique_ptr<Clock>(const std::string&)>& make_clock,
                                     unsigned jobs, const RetryPolicy& retry) {
  std::vector<TrackResult> results(post_ids.size());
  std::mutex source_mutex;
  std::mutex clock_mutex;
  std::atomic<std::size_t> next{0};
  const bool serialize = !source.thread_safe();

  auto worker = [&] {
    for (std::size_t i = next++; i < post_ids.size(); i = next++) {
      std::unique_ptr<Clock> clock;
      {
        std::lock_guard lock(clock_mutex);
        clock = make_clock(post_ids[i]);
      }
      auto fetch = [&](const std::string& id) {
        if (!serialize) return source.fetch(id);
        std::lock_guard lock(source_mutex);
        return source.fetch(id);
      };
      results[i] = track_impl(fetch, post_ids[i], until_minutes, schedule, *clock, retry);
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, post_ids.size()))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

json to_json(const TrackResult& r) {
  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    json js = {{"t_minutes", s.t_minutes},
               {"score", s.score},
               {"comments", s.comments},
               {"crossposts", s.crossposts},
               {"category", std::string(to_string(s.category))}};
    if (s.upvote_ratio) js["upvote_ratio"] = *s.upvote_ratio;
    snaps.push_back(std::move(js));
  }
  return {{"post_id", r.post_id},
          {"termination", std::string(to_string(r.reason))},
          {"failed_polls", r.failed_polls},
          {"snapshots", std::move(snaps)}};
}

}  // namespace virality::collector
