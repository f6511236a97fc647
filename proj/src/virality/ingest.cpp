// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "virality/catalog.hpp"
#include "virality/common.hpp"

namespace virality {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Enum names

namespace {

template <class E, std::size_t N>
std::optional<E> lookup(const std::pair<E, std::string_view> (&table)[N], std::string_view s) {
  for (const auto& [value, name] : table)
    if (name == s) return value;
  return std::nullopt;
}

template <class E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E e) {
  for (const auto& [value, name] : table)
    if (value == e) return name;
  return "unknown";
}

const std::pair<Category, std::string_view> kCategories[] = {{Category::New, "new"},
                                                             {Category::Rising, "rising"},
                                                             {Category::Hot, "hot"},
                                                             {Category::Top, "top"},
                                                             {Category::Unknown, "unknown"}};

const std::pair<MediaType, std::string_view> kMediaTypes[] = {{MediaType::Image, "image"},
                                                              {MediaType::Video, "video"},
                                                              {MediaType::Gif, "gif"},
                                                              {MediaType::Text, "text"},
                                                              {MediaType::Audio, "audio"}};

const std::pair<LanguageGroup, std::string_view> kLanguages[] = {
    {LanguageGroup::English, "english"}, {LanguageGroup::German, "german"},
    {LanguageGroup::Turkish, "turkish"}, {LanguageGroup::Nordic, "nordic"},
    {LanguageGroup::French, "french"},   {LanguageGroup::Spanish, "spanish"},
    {LanguageGroup::Portuguese, "portuguese"}, {LanguageGroup::Italian, "italian"}};

}  // namespace

std::string_view to_string(Category c) noexcept { return name_of(kCategories, c); }
std::string_view to_string(MediaType m) noexcept { return name_of(kMediaTypes, m); }
std::string_view to_string(LanguageGroup g) noexcept { return name_of(kLanguages, g); }
std::optional<Category> category_from_string(std::string_view s) noexcept { return lookup(kCategories, s); }
std::optional<MediaType> media_type_from_string(std::string_view s) noexcept { return lookup(kMediaTypes, s); }
std::optional<LanguageGroup> language_group_from_string(std::string_view s) noexcept {
  return lookup(kLanguages, s);
}

std::optional<int> category_rank(Category c) noexcept {
  switch (c) {
    case Category::New: return 0;
    case Category::Rising: return 1;
    case Category::Hot: return 2;
    case Category::Top: return 3;
    case Category::Unknown: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Timestamps

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) fail(ErrorKind::Parse, "truncated timestamp '" + std::string(text) + "'");
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      fail(ErrorKind::Parse, "malformed timestamp '" + std::string(text) + "'");
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

}  // namespace

std::int64_t parse_iso8601_utc(std::string_view text) {
  auto expect = [&](std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c)
      fail(ErrorKind::Parse, "malformed timestamp '" + std::string(text) + "'");
  };
  const int year = read_digits(text, 0, 4);
  expect(4, '-');
  const int month = read_digits(text, 5, 2);
  expect(7, '-');
  const int day = read_digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' '))
    fail(ErrorKind::Parse, "malformed timestamp '" + std::string(text) + "'");
  const int hour = read_digits(text, 11, 2);
  expect(13, ':');
  const int minute = read_digits(text, 14, 2);
  expect(16, ':');
  const int second = read_digits(text, 17, 2);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00")
    fail(ErrorKind::Parse, "timestamp '" + std::string(text) + "' is not UTC");
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    fail(ErrorKind::Parse, "timestamp '" + std::string(text) + "' out of range");
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const PostRecord& r) {
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
  json j = {{"post_id", r.post_id},
            {"created_utc", format_iso8601_utc(r.created_utc)},
            {"title", r.title},
            {"author",
             {{"total_karma", r.author.total_karma},
              {"account_age_days", r.author.account_age_days},
              {"is_premium", r.author.is_premium}}},
            {"subreddit",
             {{"name", r.subreddit.name},
              {"subscribers", r.subreddit.subscribers},
              {"language_group", std::string(to_string(r.subreddit.language_group))}}},
            {"media_type", std::string(to_string(r.media_type))},
            {"media_url", r.media_url},
            {"removed", r.removed},
            {"snapshots", std::move(snaps)}};
  if (r.static_features) {
    json blob = json::object();
    for (const auto& [key, value] : *r.static_features)
      std::visit([&](const auto& v) { blob[key] = v; }, value);
    j["static_features"] = std::move(blob);
  }
  return j;
}

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::Parse, "missing field '" + path + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) fail(ErrorKind::Parse, "field '" + path + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_integer()) fail(ErrorKind::Parse, "field '" + path + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) fail(ErrorKind::Parse, "field '" + path + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_boolean()) fail(ErrorKind::Parse, "field '" + path + key + "' must be a boolean");
  return v.get<bool>();
}

const json& get_object(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_object()) fail(ErrorKind::Parse, "field '" + path + key + "' must be an object");
  return v;
}

template <class E>
E get_enum(const json& obj, const char* key, const std::string& path, std::optional<E> (*conv)(std::string_view)) {
  const std::string s = get_string(obj, key, path);
  auto e = conv(s);
  if (!e) fail(ErrorKind::Parse, "field '" + path + key + "' has unknown value '" + s + "'");
  return *e;
}

}  // namespace

PostRecord record_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "record must be a JSON object");
  PostRecord r;
  r.post_id = get_string(j, "post_id", "");
  r.created_utc = parse_iso8601_utc(get_string(j, "created_utc", ""));
  r.title = get_string(j, "title", "");

  const json& author = get_object(j, "author", "");
  r.author.total_karma = get_int(author, "total_karma", "author.");
  r.author.account_age_days = get_number(author, "account_age_days", "author.");
  r.author.is_premium = get_bool(author, "is_premium", "author.");

  const json& sub = get_object(j, "subreddit", "");
  r.subreddit.name = get_string(sub, "name", "subreddit.");
  r.subreddit.subscribers = get_int(sub, "subscribers", "subreddit.");
  r.subreddit.language_group = get_enum<LanguageGroup>(sub, "language_group", "subreddit.", language_group_from_string);

  r.media_type = get_enum<MediaType>(j, "media_type", "", media_type_from_string);
  if (auto it = j.find("media_url"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) fail(ErrorKind::Parse, "field 'media_url' must be a string");
    r.media_url = it->get<std::string>();
  }
  if (auto it = j.find("removed"); it != j.end()) {
    if (!it->is_boolean()) fail(ErrorKind::Parse, "field 'removed' must be a boolean");
    r.removed = it->get<bool>();
  }

  const json& snaps = field(j, "snapshots", "");
  if (!snaps.is_array()) fail(ErrorKind::Parse, "field 'snapshots' must be an array");
  r.snapshots.reserve(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const json& s = snaps[i];
    const std::string path = "snapshots[" + std::to_string(i) + "].";
    if (!s.is_object()) fail(ErrorKind::Parse, "'" + path.substr(0, path.size() - 1) + "' must be an object");
    EngagementSnapshot snap;
    snap.t_minutes = get_number(s, "t_minutes", path);
    snap.score = get_int(s, "score", path);
    snap.comments = get_int(s, "comments", path);
    snap.crossposts = get_int(s, "crossposts", path);
    if (auto it = s.find("upvote_ratio"); it != s.end() && !it->is_null()) {
      if (!it->is_number()) fail(ErrorKind::Parse, "field '" + path + "upvote_ratio' must be a number");
      snap.upvote_ratio = it->get<double>();
    }
    if (s.contains("category")) snap.category = get_enum<Category>(s, "category", path, category_from_string);
    r.snapshots.push_back(snap);
  }

  if (auto it = j.find("static_features"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail(ErrorKind::Parse, "field 'static_features' must be an object");
    StaticBlob blob;
    for (const auto& [key, value] : it->items()) {
      if (value.is_null()) continue;
      if (value.is_boolean())
        blob.emplace(key, value.get<bool>());
      else if (value.is_number())
        blob.emplace(key, value.get<double>());
      else if (value.is_string())
        blob.emplace(key, value.get<std::string>());
      else
        fail(ErrorKind::Parse, "field 'static_features." + key + "' must be a scalar");
    }
    r.static_features = std::move(blob);
  }
  return r;
}

std::string serialize_record(const PostRecord& r) { return to_json(r).dump(); }

void write_dataset(const std::filesystem::path& path, const std::vector<PostRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write dataset '" + path.string() + "'");
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::optional<PostRecord> DatasetReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      return record_from_json(json::parse(line));
    } catch (const json::exception& e) {
      diagnostics_.push_back({line_no_, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      diagnostics_.push_back({line_no_, e.what()});
    }
  }
  return std::nullopt;
}

ParseResult parse_dataset(std::istream& in) {
  DatasetReader reader(in);
  ParseResult result;
  while (auto r = reader.next()) result.records.push_back(std::move(*r));
  result.diagnostics = reader.diagnostics();
  return result;
}

ParseResult parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open dataset '" + path.string() + "'");
  return parse_dataset(in);
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_record(const PostRecord& r) {
  ValidationReport report;
  auto add = [&](ViolationCode code, std::optional<std::size_t> idx, std::string msg) {
    report.push_back({code, idx, std::move(msg)});
  };
  auto at = [](std::size_t i) { return " at index " + std::to_string(i); };

  if (r.post_id.empty()) add(ViolationCode::EmptyPostId, std::nullopt, "empty post_id");
  if (r.subreddit.subscribers < 1) add(ViolationCode::SubscribersBelowOne, std::nullopt, "subscribers < 1");
  if (!std::isfinite(r.author.account_age_days))
    add(ViolationCode::NonFiniteValue, std::nullopt, "non-finite account_age_days");
  else if (r.author.account_age_days < 0)
    add(ViolationCode::NegativeAccountAge, std::nullopt, "negative account_age_days");
  if (r.snapshots.empty()) add(ViolationCode::EmptySnapshots, std::nullopt, "no snapshots");

  bool monotone_reported = false;
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    const auto& s = r.snapshots[i];
    if (!std::isfinite(s.t_minutes)) {
      add(ViolationCode::NonFiniteValue, i, "non-finite time" + at(i));
      continue;
    }
    if (s.t_minutes < 0) add(ViolationCode::NegativeTime, i, "negative time" + at(i));
    if (!monotone_reported && i > 0 && !(s.t_minutes > r.snapshots[i - 1].t_minutes)) {
      add(ViolationCode::NonIncreasingTime, i, "non-increasing time" + at(i));
      monotone_reported = true;
    }
    if (s.comments < 0) add(ViolationCode::NegativeComments, i, "negative comments" + at(i));
    if (s.crossposts < 0) add(ViolationCode::NegativeCrossposts, i, "negative crossposts" + at(i));
    if (s.upvote_ratio && !(*s.upvote_ratio >= 0.0 && *s.upvote_ratio <= 1.0))
      add(ViolationCode::UpvoteRatioOutOfRange, i, "upvote_ratio outside [0,1]" + at(i));
  }

  if (r.static_features) {
    for (const auto& [key, value] : *r.static_features) {
      const StaticField* f = find_static_field(key);
      if (!f) {
        add(ViolationCode::UnknownStaticField, std::nullopt, "unknown static field '" + key + "'");
        continue;
      }
      const bool numeric_ok = std::holds_alternative<bool>(value) || std::holds_alternative<double>(value);
      const bool ok = f->kind == ColumnKind::Numeric ? numeric_ok : std::holds_alternative<std::string>(value);
      if (!ok) add(ViolationCode::StaticFieldType, std::nullopt, "static field '" + key + "' has the wrong type");
      if (const double* d = std::get_if<double>(&value); d && !std::isfinite(*d))
        add(ViolationCode::NonFiniteValue, std::nullopt, "non-finite static field '" + key + "'");
    }
  }
  return report;
}

std::map<std::string, ValidationReport> validate_dataset(const std::vector<PostRecord>& records) {
  std::map<std::string, ValidationReport> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    ValidationReport rep = validate_record(r);
    if (!seen.insert(r.post_id).second)
      rep.push_back({ViolationCode::DuplicatePostId, std::nullopt, "duplicate post_id '" + r.post_id + "'"});
    if (!rep.empty()) {
      auto& slot = out[r.post_id];
      slot.insert(slot.end(), rep.begin(), rep.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quality filters

std::string_view to_string(FilterReason r) noexcept {
  switch (r) {
    case FilterReason::Removed: return "removed";
    case FilterReason::NoMedia: return "no_media";
    case FilterReason::NoSnapshots: return "no_snapshots";
    case FilterReason::ShortTracking: return "short_tracking";
    case FilterReason::TrackingGap: return "tracking_gap";
  }
  return "unknown";
}

json to_json(const FilterSummary& s) {
  return {{"raw", s.raw},
          {"removed", s.removed},
          {"no_media", s.no_media},
          {"no_snapshots", s.no_snapshots},
          {"short_tracking", s.short_tracking},
          {"tracking_gap", s.tracking_gap},
          {"kept", s.kept}};
}

std::optional<FilterReason> filter_reason(const PostRecord& r, const FilterOptions& opts) {
  if (r.removed) return FilterReason::Removed;
  if (r.media_url.empty()) return FilterReason::NoMedia;
  if (r.snapshots.empty()) return FilterReason::NoSnapshots;
  if (!(r.snapshots.back().t_minutes >= opts.min_tracking_minutes)) return FilterReason::ShortTracking;
  double prev = 0.0;
  for (const auto& s : r.snapshots) {
    if (s.t_minutes - prev > opts.max_gap_minutes) return FilterReason::TrackingGap;
    prev = s.t_minutes;
  }
  return std::nullopt;
}

std::vector<PostRecord> apply_quality_filters(std::vector<PostRecord> records, const FilterOptions& opts,
                                              FilterSummary* summary) {
  FilterSummary sum;
  sum.raw = records.size();
  std::vector<PostRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    const auto reason = filter_reason(r, opts);
    if (!reason) {
      kept.push_back(std::move(r));
      continue;
    }
    switch (*reason) {
      case FilterReason::Removed: ++sum.removed; break;
      case FilterReason::NoMedia: ++sum.no_media; break;
      case FilterReason::NoSnapshots: ++sum.no_snapshots; break;
      case FilterReason::ShortTracking: ++sum.short_tracking; break;
      case FilterReason::TrackingGap: ++sum.tracking_gap; break;
    }
  }
  sum.kept = kept.size();
  if (summary) *summary = sum;
  return kept;
}

std::string dataset_fingerprint(const std::vector<PostRecord>& records) {
  std::vector<std::string_view> ids;
  ids.reserve(records.size());
  std::int64_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ids.push_back(records[i].post_id);
    lo = i == 0 ? records[i].created_utc : std::min(lo, records[i].created_utc);
    hi = i == 0 ? records[i].created_utc : std::max(hi, records[i].created_utc);
  }
  std::sort(ids.begin(), ids.end());
  Fnv1a h;
  h.update(static_cast<std::uint64_t>(records.size()));
  h.update(static_cast<std::uint64_t>(lo));
  h.update(static_cast<std::uint64_t>(hi));
  for (auto id : ids) h.update(id);
  return std::to_string(records.size()) + ":" + format_iso8601_utc(lo) + ".." + format_iso8601_utc(hi) + ":" + h.hex();
}

}  // namespace virality
