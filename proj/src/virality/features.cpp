// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/features.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "virality/stats.hpp"

namespace virality::features {

WindowSpec::WindowSpec(double m) : minutes(m) {
  if (!(m > 0) || !std::isfinite(m)) fail(ErrorKind::Domain, "window length must be positive");
}

std::vector<EngagementSnapshot> window_view(const PostRecord& r, WindowSpec w) {
  std::vector<EngagementSnapshot> out;
  for (const auto& s : r.snapshots)
    if (s.t_minutes <= w.minutes) out.push_back(s);
  return out;
}

namespace {

constexpr double kMomentumEps = 1e-9;
constexpr double kTakeoffRelative = 0.1;
constexpr double kTakeoffMinScore = 1.0;

/// Piecewise-linear curve through (t_i, y_i), held constant outside the
/// observed range.
class Curve {
 public:
  Curve(std::vector<double> t, std::vector<double> y) : t_(std::move(t)), y_(std::move(y)) {}

  double area(double a, double b) const {
    if (t_.empty() || b <= a) return 0.0;
    double total = 0.0;
    // before the first knot
    if (a < t_.front()) {
      total += y_.front() * (std::min(b, t_.front()) - a);
      a = t_.front();
      if (b <= a) return total;
    }
    for (std::size_t i = 1; i < t_.size() && a < b; ++i) {
      const double lo = std::max(a, t_[i - 1]);
      const double hi = std::min(b, t_[i]);
      if (hi > lo) total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    if (b > t_.back()) total += y_.back() * (b - std::max(a, t_.back()));
    return total;
  }

  double at(double x) const {
    if (x <= t_.front()) return y_.front();
    if (x >= t_.back()) return y_.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin());
    const double f = (x - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return y_[i - 1] + f * (y_[i] - y_[i - 1]);
  }

 private:
  std::vector<double> t_, y_;
};

MaybeDouble ls_slope(const std::vector<double>& t, const std::vector<double>& y, double from, double to) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= from - 1e-9 && t[i] <= to + 1e-9) {
      xs.push_back(t[i]);
      ys.push_back(y[i]);
    }
  if (xs.size() < 2) return std::nullopt;
  const double mx = stats::mean(xs), my = stats::mean(ys);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx <= 0) return std::nullopt;
  return sxy / sxx;
}

int category_index(Category c) {
  switch (c) {
    case Category::New: return 0;
    case Category::Rising: return 1;
    case Category::Hot: return 2;
    case Category::Top: return 3;
    default: return -1;
  }
}

/// Time spent in each ranked category within [0, W]: snapshot i holds over
/// [t_i, t_{i+1}) and the last one until W.
std::array<double, 4> category_times(const std::vector<EngagementSnapshot>& s, double W) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double start = s[i].t_minutes;
    const double end = i + 1 < s.size() ? s[i + 1].t_minutes : W;
    const int k = category_index(s[i].category);
    if (k >= 0 && end > start) out[static_cast<std::size_t>(k)] += std::min(end, W) - start;
  }
  return out;
}

}  // namespace

TemporalFeatures extract_temporal(const PostRecord& r, WindowSpec w, const NormalizationCaps& caps) {
  TemporalFeatures f;
  const double W = w.minutes;
  f.window_minutes = W;

  std::int64_t days = r.created_utc / 86400;
  std::int64_t secs = r.created_utc % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  f.hour_of_day = static_cast<double>(secs / 3600);
  f.day_of_week = static_cast<double>(((days + 3) % 7 + 7) % 7);  // 1970-01-01 was a Thursday
  f.is_weekend = f.day_of_week >= 5 ? 1.0 : 0.0;

  const auto snaps = window_view(r, w);
  if (snaps.empty()) return f;

  const std::int64_t N = r.subreddit.subscribers;
  const std::size_t n = snaps.size();
  std::vector<double> t(n), m(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = snaps[i].t_minutes;
    m[i] = normalize_metric(snaps[i].score, N, caps.score);
  }
  const auto& last = snaps.back();
  f.norm_score = m.back();
  f.norm_num_comments = normalize_metric(last.comments, N, caps.comments);
  f.norm_num_crossposts = normalize_metric(last.crossposts, N, caps.crossposts);

  // velocity and acceleration, attributed to the interval end
  std::vector<double> v, vt, a;
  std::vector<std::size_t> vend;
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = t[i] - t[i - 1];
    if (dt <= 0) continue;
    v.push_back((m[i] - m[i - 1]) / dt);
    vt.push_back(t[i]);
    vend.push_back(i);
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double dt = vt[i] - vt[i - 1];
    if (dt > 0) a.push_back((v[i] - v[i - 1]) / dt);
  }

  if (!v.empty()) {
    const double peak = *std::max_element(v.begin(), v.end());
    f.peak_velocity = peak;
    if (peak > 0) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] >= kTakeoffRelative * peak && m[vend[i]] >= kTakeoffMinScore) {
          f.takeoff_velocity = v[i];
          f.time_to_takeoff = vt[i];
          break;
        }
      }
    }
    const double mu = stats::mean(v);
    const double sd = stats::population_std(v);
    double bursts = 0;
    if (sd > 0) {
      bool in_run = false;
      for (double x : v) {
        const bool hot = x > mu + sd;
        if (hot && !in_run) ++bursts;
        in_run = hot;
      }
    }
    f.burst_count = bursts;

    std::array<double, kEntropyBins> mass{};
    double total_mass = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const double inc = std::max(0.0, m[i] - m[i - 1]);
      if (inc <= 0) continue;
      int bin = static_cast<int>(std::ceil(t[i] * kEntropyBins / W)) - 1;
      bin = std::clamp(bin, 0, kEntropyBins - 1);
      mass[static_cast<std::size_t>(bin)] += inc;
      total_mass += inc;
    }
    double h = 0;
    if (total_mass > 0)
      for (double q : mass)
        if (q > 0) h -= (q / total_mass) * std::log2(q / total_mass);
    f.timing_entropy = h;
  }
  if (!a.empty()) {
    f.peak_acceleration = *std::max_element(a.begin(), a.end());
    f.min_acceleration = *std::min_element(a.begin(), a.end());
  }

  const Curve curve(t, m);
  const double auc = curve.area(0, W);
  f.engagement_auc = auc;
  const double first_half = curve.area(0, W / 2);
  const double second_half = curve.area(W / 2, W);
  f.momentum_ratio = (first_half == 0 && second_half == 0) ? 1.0 : second_half / (first_half + kMomentumEps);
  if (auc > 0) {
    std::vector<double> candidates;
    for (double ti : t)
      if (ti > 0) candidates.push_back(ti);
    candidates.push_back(W);
    for (double c : candidates)
      if (curve.area(0, c) >= 0.5 * auc) {
        f.half_life_minutes = c;
        break;
      }
  }
  f.slope_5min = ls_slope(t, m, W - 5, W);
  f.slope_10min = ls_slope(t, m, W - 10, W);
  f.time_to_peak = t[static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin())];

  for (const auto& s : snaps) {
    if (!f.first_vote_min && s.score > 0) f.first_vote_min = s.t_minutes;
    if (!f.first_comm_min && s.comments > 0) f.first_comm_min = s.t_minutes;
    if (!f.first_cross_min && s.crossposts > 0) f.first_cross_min = s.t_minutes;
  }

  const auto times = category_times(snaps, W);
  f.time_in_new = times[0];
  f.time_in_rising = times[1];
  f.time_in_hot = times[2];
  f.time_in_top = times[3];
  f.pct_time_in_new = times[0] / W;
  f.pct_time_in_rising = times[1] / W;
  f.pct_time_in_hot = times[2] / W;
  f.pct_time_in_top = times[3] / W;

  double transitions = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (snaps[i].category != snaps[i - 1].category) ++transitions;
  f.transitions_within = transitions;
  for (auto it = snaps.rbegin(); it != snaps.rend(); ++it)
    if (it->upvote_ratio) {
      f.upvote_ratio = *it->upvote_ratio;
      break;
    }
  f.category_snapshot = std::string(to_string(last.category));
  return f;
}

NetworkFeatures extract_network(const PostRecord& r, WindowSpec w) {
  NetworkFeatures f;
  f.author_account_age_days = r.author.account_age_days;
  f.author_is_premium = r.author.is_premium ? 1.0 : 0.0;
  f.author_total_karma = static_cast<double>(r.author.total_karma);
  f.author_karma_per_day = f.author_total_karma / std::max(r.author.account_age_days, 1.0);

  const auto snaps = window_view(r, w);
  if (snaps.empty()) {
    f.progression_pattern = "none";
    return f;
  }
  int transitions = 0, promotions = 0, demotions = 0;
  std::set<Category> seen;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    seen.insert(snaps[i].category);
    if (i == 0 || snaps[i].category == snaps[i - 1].category) continue;
    ++transitions;
    const auto from = category_rank(snaps[i - 1].category);
    const auto to = category_rank(snaps[i].category);
    if (from && to) (*to > *from ? promotions : demotions)++;
  }
  f.category_transitions = transitions;
  f.category_stability = snaps.size() > 1 ? 1.0 - transitions / static_cast<double>(snaps.size() - 1) : 1.0;
  f.unique_categories = static_cast<double>(seen.size());
  if (promotions + demotions > 0) f.promotion_demotion_ratio = promotions / static_cast<double>(promotions + demotions);
  if (transitions == 0)
    f.progression_pattern = "static";
  else if (demotions == 0 && promotions > 0)
    f.progression_pattern = "ascending";
  else if (promotions == 0 && demotions > 0)
    f.progression_pattern = "descending";
  else
    f.progression_pattern = "mixed";

  f.pct_time_in_new = category_times(snaps, w.minutes)[0] / w.minutes;
  for (const auto& s : snaps) {
    if (!f.time_to_hot && s.category == Category::Hot) f.time_to_hot = s.t_minutes;
    if (!f.time_to_rising && s.category == Category::Rising) f.time_to_rising = s.t_minutes;
    if (!f.time_to_top && s.category == Category::Top) f.time_to_top = s.t_minutes;
  }
  return f;
}

// ---------------------------------------------------------------------------

namespace {

FeatureValue num(const MaybeDouble& d) { return d ? FeatureValue(*d) : FeatureValue(); }
FeatureValue num(double d) { return FeatureValue(d); }
FeatureValue cat(const std::optional<std::string>& s) { return s ? FeatureValue(*s) : FeatureValue(); }

using TemporalGetter = FeatureValue (*)(const TemporalFeatures&);
using NetworkGetter = FeatureValue (*)(const NetworkFeatures&);

struct TemporalColumn {
  const char* name;
  ColumnKind kind;
  TemporalGetter get;
};
struct NetworkColumn {
  const char* name;
  ColumnKind kind;
  NetworkGetter get;
};

#define TCOL(field) TemporalColumn{#field, ColumnKind::Numeric, [](const TemporalFeatures& f) { return num(f.field); }}
#define NCOL(field) NetworkColumn{#field, ColumnKind::Numeric, [](const NetworkFeatures& f) { return num(f.field); }}

const TemporalColumn kTemporalColumns[] = {
    TCOL(burst_count),
    TemporalColumn{"category_snapshot", ColumnKind::Categorical,
                   [](const TemporalFeatures& f) { return cat(f.category_snapshot); }},
    TCOL(day_of_week),
    TCOL(engagement_auc),
    TCOL(first_comm_min),
    TCOL(first_cross_min),
    TCOL(first_vote_min),
    TCOL(half_life_minutes),
    TCOL(hour_of_day),
    TCOL(is_weekend),
    TCOL(min_acceleration),
    TCOL(momentum_ratio),
    TCOL(norm_num_comments),
    TCOL(norm_num_crossposts),
    TCOL(norm_score),
    TCOL(pct_time_in_hot),
    TCOL(pct_time_in_new),
    TCOL(pct_time_in_rising),
    TCOL(pct_time_in_top),
    TCOL(peak_acceleration),
    TCOL(peak_velocity),
    TCOL(slope_10min),
    TCOL(slope_5min),
    TCOL(takeoff_velocity),
    TCOL(time_in_hot),
    TCOL(time_in_new),
    TCOL(time_in_rising),
    TCOL(time_in_top),
    TCOL(time_to_peak),
    TCOL(time_to_takeoff),
    TCOL(timing_entropy),
    TCOL(transitions_within),
    TCOL(upvote_ratio),
    TCOL(window_minutes),
};

const NetworkColumn kNetworkColumns[] = {
    NCOL(author_account_age_days),
    NCOL(author_is_premium),
    NCOL(author_karma_per_day),
    NCOL(author_total_karma),
    NCOL(category_stability),
    NCOL(category_transitions),
    NetworkColumn{"network_pct_time_in_new", ColumnKind::Numeric,
                  [](const NetworkFeatures& f) { return num(f.pct_time_in_new); }},
    NetworkColumn{"progression_pattern", ColumnKind::Categorical,
                  [](const NetworkFeatures& f) { return FeatureValue(f.progression_pattern); }},
    NCOL(promotion_demotion_ratio),
    NCOL(time_to_hot),
    NCOL(time_to_rising),
    NCOL(time_to_top),
    NCOL(unique_categories),
};

#undef TCOL
#undef NCOL

std::vector<const StaticField*> static_fields_sorted(Modality m) {
  std::vector<const StaticField*> out;
  for (const auto& f : static_catalog())
    if (f.modality == m) out.push_back(&f);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->name < b->name; });
  return out;
}

std::size_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

}  // namespace

std::set<Modality> all_modalities() { return {std::begin(kAllModalities), std::end(kAllModalities)}; }

std::vector<ColumnDescriptor> column_layout(const std::set<Modality>& include) {
  std::vector<ColumnDescriptor> cols;
  for (Modality m : include) {
    std::vector<ColumnDescriptor> group;
    if (m == Modality::Temporal)
      for (const auto& c : kTemporalColumns) group.push_back({c.name, m, c.kind});
    else if (m == Modality::Network)
      for (const auto& c : kNetworkColumns) group.push_back({c.name, m, c.kind});
    else
      for (const StaticField* f : static_fields_sorted(m)) group.push_back({std::string(f->name), m, f->kind});
    std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    cols.insert(cols.end(), group.begin(), group.end());
  }
  return cols;
}

std::vector<std::pair<StaticField, FeatureValue>> extract_static(const PostRecord& r) {
  std::vector<std::pair<StaticField, FeatureValue>> out;
  for (const auto& field : static_catalog()) {
    FeatureValue value;
    if (r.static_features) {
      auto it = r.static_features->find(std::string(field.name));
      if (it != r.static_features->end()) {
        const StaticValue& v = it->second;
        if (field.kind == ColumnKind::Numeric) {
          if (const bool* b = std::get_if<bool>(&v)) value = *b ? 1.0 : 0.0;
          if (const double* d = std::get_if<double>(&v); d && std::isfinite(*d)) value = *d;
        } else if (const std::string* s = std::get_if<std::string>(&v)) {
          value = *s;
        }
      }
    }
    if (is_missing(value)) {
      if (field.name == "title_word_count") value = static_cast<double>(word_count(r.title));
      if (field.name == "is_title_present") value = word_count(r.title) > 0 ? 1.0 : 0.0;
      if (field.name == "media_type") value = std::string(to_string(r.media_type));
    }
    out.emplace_back(field, std::move(value));
  }
  return out;
}

FeatureMatrix assemble_matrix(const std::vector<PostRecord>& records, WindowSpec w, const NormalizationCaps& caps,
                              const std::set<Modality>& include) {
  FeatureMatrix fm;
  fm.columns = column_layout(include);
  const bool want_temporal = include.contains(Modality::Temporal);
  const bool want_network = include.contains(Modality::Network);
  const bool want_static = include.contains(Modality::Visual) || include.contains(Modality::Textual) ||
                           include.contains(Modality::Contextual);

  fm.row_ids.reserve(records.size());
  fm.rows.reserve(records.size());
  for (const auto& r : records) {
    std::map<std::string, FeatureValue, std::less<>> cells;
    if (want_temporal) {
      const auto tf = extract_temporal(r, w, caps);
      for (const auto& c : kTemporalColumns) cells.emplace(c.name, c.get(tf));
    }
    if (want_network) {
      const auto nf = extract_network(r, w);
      for (const auto& c : kNetworkColumns) cells.emplace(c.name, c.get(nf));
    }
    if (want_static)
      for (auto& [field, value] : extract_static(r)) cells.emplace(std::string(field.name), std::move(value));

    std::vector<FeatureValue> row;
    row.reserve(fm.columns.size());
    for (const auto& col : fm.columns) row.push_back(cells.at(col.name));
    fm.row_ids.push_back(r.post_id);
    fm.rows.push_back(std::move(row));
  }
  return fm;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& idx) const {
  FeatureMatrix out;
  out.columns = columns;
  out.row_ids.reserve(idx.size());
  out.rows.reserve(idx.size());
  for (std::size_t i : idx) {
    out.row_ids.push_back(row_ids.at(i));
    out.rows.push_back(rows.at(i));
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_modalities(const std::set<Modality>& keep) const {
  std::vector<std::size_t> cols;
  FeatureMatrix out;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (keep.contains(columns[j].modality)) {
      cols.push_back(j);
      out.columns.push_back(columns[j]);
    }
  out.row_ids = row_ids;
  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<FeatureValue> r;
    r.reserve(cols.size());
    for (std::size_t j : cols) r.push_back(row[j]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

void FeatureMatrix::check_shape() const {
  if (rows.size() != row_ids.size()) fail(ErrorKind::Schema, "row id count does not match row count");
  for (const auto& row : rows)
    if (row.size() != columns.size()) fail(ErrorKind::Schema, "feature matrix is not rectangular");
  std::set<std::string> names;
  for (const auto& c : columns)
    if (!names.insert(c.name).second) fail(ErrorKind::Schema, "duplicate column '" + c.name + "'");
}

// ---------------------------------------------------------------------------
// CSV export / import

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

/// Splits one CSV record; `in` must be positioned at the record start.
bool read_csv_record(std::istream& in, std::vector<std::pair<std::string, bool>>& fields) {
  fields.clear();
  std::string cur;
  bool quoted = false, was_quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cur += '"';
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back(std::move(cur), was_quoted);
      cur.clear();
      was_quoted = false;
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!any) return false;
  fields.emplace_back(std::move(cur), was_quoted);
  return true;
}

}  // namespace

void export_matrix(const FeatureMatrix& m, const std::filesystem::path& csv, const std::filesystem::path& manifest) {
  m.check_shape();
  std::ofstream out(csv, std::ios::binary);
  std::ofstream man(manifest, std::ios::binary);
  if (!out || !man) fail(ErrorKind::Io, "cannot write feature matrix to '" + csv.string() + "'");
  out << "post_id";
  for (const auto& c : m.columns) out << ',' << csv_escape(c.name);
  out << '\n';
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    out << csv_escape(m.row_ids[i]);
    for (const auto& v : m.rows[i]) {
      out << ',';
      if (const double* d = std::get_if<double>(&v))
        out << format_double(*d);
      else if (const std::string* s = std::get_if<std::string>(&v))
        out << (s->empty() ? std::string("\"\"") : csv_escape(*s));
    }
    out << '\n';
  }
  man << "name,modality,kind\n";
  for (const auto& c : m.columns) man << csv_escape(c.name) << ',' << to_string(c.modality) << ',' << to_string(c.kind) << '\n';
}

FeatureMatrix import_matrix(const std::filesystem::path& csv, const std::filesystem::path& manifest) {
  std::ifstream man(manifest, std::ios::binary);
  std::ifstream in(csv, std::ios::binary);
  if (!man || !in) fail(ErrorKind::Io, "cannot read feature matrix '" + csv.string() + "'");
  FeatureMatrix m;
  std::vector<std::pair<std::string, bool>> fields;
  read_csv_record(man, fields);  // header
  while (read_csv_record(man, fields)) {
    if (fields.size() == 1 && fields[0].first.empty()) continue;
    if (fields.size() != 3) fail(ErrorKind::Parse, "malformed manifest line");
    const auto mod = modality_from_string(fields[1].first);
    const auto kind = column_kind_from_string(fields[2].first);
    if (!mod || !kind) fail(ErrorKind::Parse, "unknown modality or kind in manifest");
    m.columns.push_back({fields[0].first, *mod, *kind});
  }
  if (!read_csv_record(in, fields) || fields.size() != m.columns.size() + 1)
    fail(ErrorKind::Schema, "feature CSV header does not match manifest");
  for (std::size_t j = 0; j < m.columns.size(); ++j)
    if (fields[j + 1].first != m.columns[j].name) fail(ErrorKind::Schema, "feature CSV column order differs from manifest");
  std::size_t line = 1;
  while (read_csv_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].first.empty() && !fields[0].second) continue;
    if (fields.size() != m.columns.size() + 1)
      fail(ErrorKind::Parse, "feature CSV line " + std::to_string(line) + " has the wrong width");
    m.row_ids.push_back(fields[0].first);
    std::vector<FeatureValue> row;
    row.reserve(m.columns.size());
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      const auto& [text, quoted] = fields[j + 1];
      if (text.empty() && !quoted) {
        row.emplace_back();
      } else if (m.columns[j].kind == ColumnKind::Numeric) {
        double d = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), d);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
          fail(ErrorKind::Parse, "non-numeric value '" + text + "' in column '" + m.columns[j].name + "'");
        row.emplace_back(d);
      } else {
        row.emplace_back(text);
      }
    }
    m.rows.push_back(std::move(row));
  }
  m.check_shape();
  return m;
}

}  // namespace virality::features
