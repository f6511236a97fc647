// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "virality/catalog.hpp"
#include "virality/collector.hpp"
#include "virality/common.hpp"

namespace virality::synth {

using nlohmann::json;

std::string_view to_string(SignalPlacement p) noexcept {
  switch (p) {
    case SignalPlacement::Temporal: return "temporal";
    case SignalPlacement::Network: return "network";
    case SignalPlacement::Static: return "static";
    case SignalPlacement::Mixed: return "mixed";
  }
  return "unknown";
}

std::optional<SignalPlacement> placement_from_string(std::string_view s) noexcept {
  for (auto p : {SignalPlacement::Temporal, SignalPlacement::Network, SignalPlacement::Static, SignalPlacement::Mixed})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

void validate_config(const SynthConfig& c) {
  if (c.n_posts < 20) fail(ErrorKind::Config, "synthetic corpus needs at least 20 posts");
  if (!(c.viral_frac > 0 && c.viral_frac < 1)) fail(ErrorKind::Config, "viral_frac must lie in (0, 1)");
  if (c.min_subscribers < 1 || c.max_subscribers < c.min_subscribers)
    fail(ErrorKind::Config, "subscriber range must satisfy 1 <= min <= max");
  if (!(c.viral_plateau_median > 0) || !(c.nonviral_plateau_median > 0) || c.viral_plateau_sigma < 0 ||
      c.nonviral_plateau_sigma < 0 || c.noise_scale < 0)
    fail(ErrorKind::Config, "plateau parameters must be positive");
  if (!(c.nonviral_rate_min > 0) || c.nonviral_rate_max < c.nonviral_rate_min)
    fail(ErrorKind::Config, "non-viral growth rates must be positive and ordered");
  if (!(c.tracking_minutes > 0) || !(c.mean_gap_minutes > 0)) fail(ErrorKind::Config, "durations must be positive");
  if (!(c.static_missing_rate >= 0 && c.static_missing_rate < 1))
    fail(ErrorKind::Config, "static_missing_rate must lie in [0, 1)");
  if (!(c.peak_mean > c.takeoff_mean)) fail(ErrorKind::Config, "peak time must come after takeoff");
}

std::vector<double> default_poll_grid(double horizon_minutes) {
  const auto schedule = collector::PollSchedule::default_schedule();
  std::vector<double> grid;
  for (double t = 0; t <= horizon_minutes + 1e-9; t += collector::schedule_next_poll(t, schedule)) grid.push_back(t);
  return grid;
}

namespace {

struct SubredditSpec {
  const char* name;
  LanguageGroup group;
};

constexpr SubredditSpec kSubreddits[] = {
    {"memes", LanguageGroup::English},         {"formuladank", LanguageGroup::English},
    {"shitposting", LanguageGroup::English},   {"antimeme", LanguageGroup::English},
    {"historymemes", LanguageGroup::English},  {"me_irl", LanguageGroup::English},
    {"dankmemes", LanguageGroup::English},     {"lotrmemes", LanguageGroup::English},
    {"bonehurtingjuice", LanguageGroup::English}, {"bikinibottomtwitter", LanguageGroup::English},
    {"surrealmemes", LanguageGroup::English},  {"raimimemes", LanguageGroup::English},
    {"wholesomemes", LanguageGroup::English},  {"wholesomememes", LanguageGroup::English},
    {"rance", LanguageGroup::French},          {"moi_dlvv", LanguageGroup::French},
    {"ich_iel", LanguageGroup::German},        {"okbrudimongo", LanguageGroup::German},
    {"deutschememes", LanguageGroup::German},  {"unket", LanguageGroup::Nordic},
    {"dankmark", LanguageGroup::Nordic},       {"eu_nvr", LanguageGroup::Portuguese},
    {"dankgentina", LanguageGroup::Spanish},   {"yo_elvr", LanguageGroup::Spanish},
    {"burdurland", LanguageGroup::Turkish},
};

const char* language_code(LanguageGroup g) {
  switch (g) {
    case LanguageGroup::English: return "en";
    case LanguageGroup::German: return "de";
    case LanguageGroup::Turkish: return "tr";
    case LanguageGroup::Nordic: return "sv";
    case LanguageGroup::French: return "fr";
    case LanguageGroup::Spanish: return "es";
    case LanguageGroup::Portuguese: return "pt";
    case LanguageGroup::Italian: return "it";
  }
  return "en";
}

const std::map<std::string_view, std::vector<std::string>>& vocabularies() {
  static const std::map<std::string_view, std::vector<std::string>> v = {
      {"offense_type", {"none", "mild", "political", "religious"}},
      {"cultural_reference_type", {"none", "movie", "game", "history", "sports", "internet"}},
      {"primary_topic", {"gaming", "politics", "animals", "work", "relationships", "sports", "tech", "school"}},
      {"target_audience", {"general", "gamers", "students", "fans", "locals"}},
      {"meme_type", {"reaction", "image_macro", "comic", "screenshot", "video_edit"}},
      {"analyzed_media_type", {"photo", "drawing", "screenshot", "collage"}},
      {"title_media_coherence", {"high", "medium", "low"}},
      {"controversy_type", {"none", "opinion", "social", "political"}},
      {"emotional_resonance", {"amusement", "nostalgia", "frustration", "surprise", "wholesome"}},
      {"humor_type", {"absurd", "sarcasm", "wordplay", "observational", "dark", "self_deprecating"}},
      {"profanity_level", {"none", "mild", "strong"}},
      {"format_effort", {"low", "medium", "high"}},
      {"social_platform", {"reddit", "twitter", "tiktok", "instagram", "none"}},
      {"social_shareability", {"low", "medium", "high"}},
      {"social_currency", {"low", "medium", "high"}},
      {"social_trend", {"none", "emerging", "peak", "fading"}},
      {"text_sentiment_overall", {"positive", "neutral", "negative"}},
      {"text_image_alignment", {"aligned", "contrasting", "unrelated"}},
      {"text_tone", {"ironic", "sincere", "angry", "playful"}},
      {"title_sentiment", {"positive", "neutral", "negative"}},
      {"key_objects_primary", {"person", "animal", "text", "vehicle", "food", "character"}},
      {"composition", {"single", "split", "grid", "sequence"}},
      {"panels", {"1", "2", "3", "4+"}},
      {"template_name", {"drake", "distracted_boyfriend", "two_buttons", "expanding_brain", "custom", "wojak"}},
      {"facial_expression_primary_emotion", {"joy", "anger", "surprise", "sadness", "neutral"}},
      {"identified_character_name", {"spongebob", "gandalf", "shrek", "pepe"}},
      {"identified_person_celebrity_name", {"celebrity_a", "celebrity_b", "celebrity_c"}},
  };
  return v;
}

constexpr const char* kWords[] = {"when", "the",  "my",  "cat",   "finally", "monday", "boss", "exam",  "me",
                                  "irl",  "nobody", "is", "this", "every",   "time",   "race", "again", "meme"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Normalized cumulative score of a logistic curve that starts at zero.
struct Curve {
  double K, r, tm;
  double operator()(double t) const { return K * (logistic(r * (t - tm)) - logistic(-r * tm)); }
};

std::vector<std::pair<double, Category>> category_path(bool strong, double horizon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<double, Category>> path{{0.0, Category::New}};
  const double p_rising = strong ? 0.95 : 0.4, p_hot = strong ? 0.8 : 0.15, p_top = strong ? 0.4 : 0.03;
  double t = strong ? 10 + 20 * u(rng) : 20 + 100 * u(rng);
  if (u(rng) < p_rising && t < horizon) {
    path.emplace_back(t, Category::Rising);
    t += strong ? 20 + 40 * u(rng) : 60 + 200 * u(rng);
    if (u(rng) < p_hot && t < horizon) {
      path.emplace_back(t, Category::Hot);
      t += 200 + 400 * u(rng);
      if (u(rng) < p_top && t < horizon) path.emplace_back(t, Category::Top);
    } else if (u(rng) < 0.5) {
      path.emplace_back(t, Category::New);  // demoted back out of rising
    }
  }
  return path;
}

Category category_at(const std::vector<std::pair<double, Category>>& path, double t) {
  Category c = path.front().second;
  for (const auto& [start, cat] : path)
    if (start <= t) c = cat;
  return c;
}

StaticBlob make_static(bool viral_signal, LanguageGroup lang, MediaType media, const std::string& title,
                       double missing_rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  auto pick = [&](const std::vector<std::string>& v) { return v[static_cast<std::size_t>(u(rng) * v.size()) % v.size()]; };
  auto score0_10 = [&](double shift) { return std::clamp(std::round(2 + 5 * u(rng) + shift), 0.0, 10.0); };
  StaticBlob b;
  for (const auto& f : static_catalog()) {
    const std::string name(f.name);
    StaticValue v;
    if (name == "text_language") {
      v = std::string(language_code(lang));
    } else if (name == "media_type") {
      v = std::string(to_string(media));
    } else if (name == "title_word_count") {
      v = static_cast<double>(std::count(title.begin(), title.end(), ' ') + 1);
    } else if (name == "is_title_present") {
      v = true;
    } else if (name == "text_word_count") {
      v = std::floor(20 * u(rng));
    } else if (name == "image_height" || name == "image_width") {
      v = 400.0 + 40.0 * std::floor(20 * u(rng));
    } else if (f.kind == ColumnKind::Categorical) {
      const auto& voc = vocabularies().at(f.name);
      if (viral_signal && name == "humor_type" && u(rng) < 0.7)
        v = std::string("absurd");
      else if (viral_signal && name == "template_name" && u(rng) < 0.6)
        v = std::string("drake");
      else
        v = pick(voc);
    } else if (name.rfind("is_", 0) == 0 || name.find("_is_") != std::string::npos) {
      v = u(rng) < 0.3;
    } else {
      const bool boosted = viral_signal && (name == "relatability_score" || name == "format_appeal");
      v = score0_10(boosted ? 4.0 : 0.0);
    }
    if (name != "text_language" && name != "media_type" && u(rng) < missing_rate) continue;
    b.emplace(name, std::move(v));
  }
  return b;
}

}  // namespace

SynthCorpus generate(const SynthConfig& c) {
  validate_config(c);
  const std::size_t n = c.n_posts;
  const auto n_viral = static_cast<std::size_t>(std::llround(c.viral_frac * static_cast<double>(n)));
  std::mt19937_64 master(splitmix64(c.seed));

  std::vector<int> planted(n, 0);
  std::fill(planted.begin(), planted.begin() + static_cast<std::ptrdiff_t>(n_viral), 1);
  std::shuffle(planted.begin(), planted.end(), master);

  // One subscriber count per community.
  std::vector<std::int64_t> subs;
  {
    std::uniform_real_distribution<double> lu(std::log(static_cast<double>(c.min_subscribers)),
                                              std::log(static_cast<double>(c.max_subscribers)));
    for (std::size_t s = 0; s < std::size(kSubreddits); ++s)
      subs.push_back(std::max(c.min_subscribers, static_cast<std::int64_t>(std::llround(std::exp(lu(master))))));
  }

  const auto grid = default_poll_grid(c.tracking_minutes);
  const bool temporal_sig = c.placement == SignalPlacement::Temporal || c.placement == SignalPlacement::Mixed;
  const bool network_sig = c.placement == SignalPlacement::Network || c.placement == SignalPlacement::Mixed;
  const bool static_sig = c.placement == SignalPlacement::Static || c.placement == SignalPlacement::Mixed;

  SynthCorpus out;
  out.planted = planted;
  out.records.reserve(n);
  double clock_minutes = 0;
  std::exponential_distribution<double> gap(1.0 / c.mean_gap_minutes);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(splitmix64(c.seed ^ splitmix64(i + 1)));
    std::uniform_real_distribution<double> u(0, 1);
    std::normal_distribution<double> z(0, 1);
    const bool viral = planted[i] != 0;
    clock_minutes += gap(master);

    PostRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "syn%07zu", i);
    r.post_id = id;
    r.created_utc = c.start_utc + static_cast<std::int64_t>(std::floor(clock_minutes * 60.0));
    const auto sub = static_cast<std::size_t>(u(rng) * std::size(kSubreddits)) % std::size(kSubreddits);
    r.subreddit = {kSubreddits[sub].name, subs[sub], kSubreddits[sub].group};
    const double mt = u(rng);
    r.media_type = mt < 0.75 ? MediaType::Image : mt < 0.9 ? MediaType::Video : mt < 0.97 ? MediaType::Gif : MediaType::Text;
    r.media_url = "https://media.example.net/" + r.post_id;
    {
      const int words = 2 + static_cast<int>(u(rng) * 8);
      for (int w = 0; w < words; ++w) {
        if (w) r.title += ' ';
        r.title += kWords[static_cast<std::size_t>(u(rng) * std::size(kWords)) % std::size(kWords)];
      }
    }
    const bool author_boost = viral && network_sig;
    r.author.total_karma = static_cast<std::int64_t>(std::llround(std::exp(std::log(author_boost ? 60000.0 : 8000.0) + 1.0 * z(rng))));
    r.author.account_age_days = std::floor(30 + 3000 * u(rng));
    r.author.is_premium = u(rng) < (author_boost ? 0.5 : 0.08);

    Curve curve{};
    if (viral) {
      const double K = c.viral_plateau_median * std::exp(c.viral_plateau_sigma * c.noise_scale * z(rng));
      const double tm = std::clamp(c.peak_mean + c.peak_sd * z(rng), 200.0, 900.0);
      const double toff = std::clamp(c.takeoff_mean + c.takeoff_sd * z(rng), 5.0, 90.0);
      curve = {K, 3.637 / (tm - toff), tm};
    } else {
      const double K = c.nonviral_plateau_median * std::exp(c.nonviral_plateau_sigma * c.noise_scale * z(rng));
      const double rate = c.nonviral_rate_min + (c.nonviral_rate_max - c.nonviral_rate_min) * u(rng);
      curve = {K, rate, 20 + 70 * u(rng)};
    }
    // Without a temporal signal, early dynamics are shared: viral posts
    // follow the non-viral shape until a late surge.
    const bool late_surge = viral && !temporal_sig;
    const Curve early{c.nonviral_plateau_median, 0.5 * (c.nonviral_rate_min + c.nonviral_rate_max), 55};
    const Curve late{curve.K, 0.02, 0.6 * c.tracking_minutes};
    auto expected = [&](double t) { return late_surge ? early(t) + late(t) - late(0) : curve(t); };

    const double scale = static_cast<double>(r.subreddit.subscribers) / 1e5;
    const double comment_ratio = 0.05 + 0.15 * u(rng);
    const double cross_ratio = 0.002 + 0.008 * u(rng);
    const auto path = category_path(viral && network_sig, c.tracking_minutes, rng);
    const double base_ratio = 0.7 + 0.25 * u(rng);

    std::int64_t score = 1, comments = 0, crossposts = 0;
    double prev = 0;
    for (double t : grid) {
      const double e = std::max(expected(t), prev);
      const double inc = (e - prev) * scale;
      prev = e;
      if (inc > 0) {
        score += std::poisson_distribution<std::int64_t>(inc)(rng);
        comments += std::poisson_distribution<std::int64_t>(inc * comment_ratio)(rng);
        crossposts += std::poisson_distribution<std::int64_t>(inc * cross_ratio)(rng);
      }
      EngagementSnapshot s;
      s.t_minutes = t;
      s.score = score;
      s.comments = comments;
      s.crossposts = crossposts;
      s.upvote_ratio = std::clamp(base_ratio + 0.02 * z(rng), 0.0, 1.0);
      s.category = category_at(path, t);
      r.snapshots.push_back(s);
    }
    r.static_features =
        make_static(viral && static_sig, r.subreddit.language_group, r.media_type, r.title, c.static_missing_rate, rng);
    out.records.push_back(std::move(r));
  }
  return out;
}

json to_json(const SynthConfig& c) {
  return {{"n_posts", c.n_posts},
          {"viral_frac", c.viral_frac},
          {"placement", std::string(to_string(c.placement))},
          {"min_subscribers", c.min_subscribers},
          {"max_subscribers", c.max_subscribers},
          {"viral_plateau_median", c.viral_plateau_median},
          {"viral_plateau_sigma", c.viral_plateau_sigma},
          {"takeoff_mean", c.takeoff_mean},
          {"takeoff_sd", c.takeoff_sd},
          {"peak_mean", c.peak_mean},
          {"peak_sd", c.peak_sd},
          {"nonviral_plateau_median", c.nonviral_plateau_median},
          {"nonviral_plateau_sigma", c.nonviral_plateau_sigma},
          {"nonviral_rate_min", c.nonviral_rate_min},
          {"nonviral_rate_max", c.nonviral_rate_max},
          {"noise_scale", c.noise_scale},
          {"tracking_minutes", c.tracking_minutes},
          {"static_missing_rate", c.static_missing_rate},
          {"start_utc", c.start_utc},
          {"mean_gap_minutes", c.mean_gap_minutes},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  try {
    auto get = [&](const char* k, auto& field) {
      if (auto it = j.find(k); it != j.end()) field = it->get<std::decay_t<decltype(field)>>();
    };
    get("n_posts", c.n_posts);
    get("viral_frac", c.viral_frac);
    if (auto it = j.find("placement"); it != j.end()) {
      const auto p = placement_from_string(it->get<std::string>());
      if (!p) fail(ErrorKind::Config, "unknown signal placement '" + it->get<std::string>() + "'");
      c.placement = *p;
    }
    get("min_subscribers", c.min_subscribers);
    get("max_subscribers", c.max_subscribers);
    get("viral_plateau_median", c.viral_plateau_median);
    get("viral_plateau_sigma", c.viral_plateau_sigma);
    get("takeoff_mean", c.takeoff_mean);
    get("takeoff_sd", c.takeoff_sd);
    get("peak_mean", c.peak_mean);
    get("peak_sd", c.peak_sd);
    get("nonviral_plateau_median", c.nonviral_plateau_median);
    get("nonviral_plateau_sigma", c.nonviral_plateau_sigma);
    get("nonviral_rate_min", c.nonviral_rate_min);
    get("nonviral_rate_max", c.nonviral_rate_max);
    get("noise_scale", c.noise_scale);
    get("tracking_minutes", c.tracking_minutes);
    get("static_missing_rate", c.static_missing_rate);
    get("start_utc", c.start_utc);
    get("mean_gap_minutes", c.mean_gap_minutes);
    get("seed", c.seed);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed synth config: ") + e.what());
  }
  validate_config(c);
  return c;
}

}  // namespace virality::synth
