// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "support/mock_static.hpp"
#include "virality/features.hpp"
#include "virality/synth.hpp"

using namespace virality;
using namespace virality::features;
using virality::testing::make_record;

namespace {

const NormalizationCaps kHuge{1e18, 1e18, 1e18};

PostRecord scripted(const std::vector<double>& t, const std::vector<std::int64_t>& score) {
  auto r = make_record("s", t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    r.snapshots[i].score = score[i];
    r.snapshots[i].comments = 0;
  }
  return r;
}

std::vector<FeatureValue> row_of(const PostRecord& r, double w) {
  return assemble_matrix({r}, WindowSpec(w), kHuge, all_modalities()).rows.at(0);
}

}  // namespace

TEST_CASE("window view drops snapshots after the window") {
  const auto r = make_record("a", {0, 5, 35});
  const auto v = window_view(r, WindowSpec(30));
  REQUIRE(v.size() == 2);
  CHECK(v[1].t_minutes == 5);
  CHECK(window_view(r, WindowSpec(1000)).size() == 3);
  CHECK(window_view(r, WindowSpec(30.0)).size() == 2);
  CHECK_THROWS(WindowSpec(0));
}

TEST_CASE("flat series") {
  const auto r = scripted({0, 5, 10, 15, 20, 25, 30}, {7, 7, 7, 7, 7, 7, 7});
  const auto f = extract_temporal(r, WindowSpec(30), kHuge);
  CHECK(*f.peak_velocity == 0.0);
  CHECK(*f.burst_count == 0.0);
  CHECK(*f.timing_entropy == 0.0);
  CHECK(*f.momentum_ratio == doctest::Approx(1.0));
}

TEST_CASE("score(t) = t closed form") {
  std::vector<double> t;
  std::vector<std::int64_t> s;
  for (int i = 0; i <= 30; i += 5) {
    t.push_back(i);
    s.push_back(i);
  }
  const auto f = extract_temporal(scripted(t, s), WindowSpec(30), kHuge);
  CHECK(*f.peak_velocity == doctest::Approx(1.0));
  CHECK(*f.engagement_auc == doctest::Approx(450.0));
  CHECK(*f.norm_score == doctest::Approx(30.0));
  CHECK(*f.time_to_peak == doctest::Approx(30.0));
  CHECK(*f.slope_10min == doctest::Approx(1.0));
  // uniform increments over the six bins
  CHECK(*f.timing_entropy == doctest::Approx(std::log2(6.0)));
  // AUC over (15,30] is 337.5, over [0,15] is 112.5
  CHECK(*f.momentum_ratio == doctest::Approx(3.0));
  // cumulative AUC t^2/2 reaches 225 at t = sqrt(450)
  REQUIRE(f.half_life_minutes.has_value());
  CHECK(*f.half_life_minutes > 0);
  CHECK(*f.half_life_minutes <= 30);
}

TEST_CASE("step series: first vote and takeoff at 25") {
  const auto r = scripted({0, 5, 10, 15, 20, 25, 30}, {0, 0, 0, 0, 0, 100, 100});
  const auto f = extract_temporal(r, WindowSpec(30), kHuge);
  CHECK(*f.first_vote_min == 25.0);
  CHECK(*f.time_to_takeoff == 25.0);
  CHECK(*f.takeoff_velocity == doctest::Approx(20.0));
  CHECK(*f.burst_count == 1.0);
  CHECK(*f.timing_entropy == 0.0);  // all mass in one bin
}

TEST_CASE("not-yet-happened values are missing, not zero") {
  const auto r = scripted({0, 5, 10}, {0, 0, 0});
  const auto f = extract_temporal(r, WindowSpec(30), kHuge);
  CHECK_FALSE(f.first_vote_min.has_value());
  CHECK_FALSE(f.first_comm_min.has_value());
  CHECK_FALSE(f.time_to_takeoff.has_value());
  CHECK_FALSE(f.half_life_minutes.has_value());
}

TEST_CASE("empty window keeps submission-time fields") {
  auto r = make_record("a", {40, 50});
  r.created_utc = 1704585600;  // Sunday 2024-01-07 00:00 UTC
  const auto f = extract_temporal(r, WindowSpec(30), kHuge);
  CHECK(f.day_of_week == 6);
  CHECK(f.is_weekend == 1);
  CHECK(f.hour_of_day == 0);
  CHECK_FALSE(f.peak_velocity.has_value());
  CHECK_FALSE(f.engagement_auc.has_value());
}

TEST_CASE("network category path") {
  auto r = make_record("a", {0, 5, 10, 15});
  const Category path[] = {Category::New, Category::New, Category::Rising, Category::Hot};
  for (int i = 0; i < 4; ++i) r.snapshots[static_cast<std::size_t>(i)].category = path[i];
  r.author = {3650, 365.0, true};
  const auto n = extract_network(r, WindowSpec(30));
  CHECK(n.category_transitions == 2);
  CHECK(n.unique_categories == 3);
  CHECK(*n.time_to_hot == 15);
  CHECK(*n.time_to_rising == 10);
  CHECK_FALSE(n.time_to_top.has_value());
  CHECK(n.author_karma_per_day == doctest::Approx(10.0));
  CHECK(n.author_is_premium == 1);
  CHECK(n.progression_pattern == "ascending");
}

TEST_CASE("network: single snapshot and young accounts") {
  auto r = make_record("a", {0});
  r.author = {500, 0.25, false};
  const auto n = extract_network(r, WindowSpec(30));
  CHECK(n.category_transitions == 0);
  CHECK(*n.category_stability == 1.0);
  CHECK(n.author_karma_per_day == doctest::Approx(500.0));  // max(age, 1)
}

TEST_CASE("percent time fields stay in range and sum to at most one") {
  synth::SynthConfig c;
  c.n_posts = 150;
  c.placement = synth::SignalPlacement::Mixed;
  for (const auto& r : synth::generate(c).records)
    for (double w : kSweepWindows) {
      const auto f = extract_temporal(r, WindowSpec(w), kHuge);
      double sum = 0;
      for (const auto& p : {f.pct_time_in_new, f.pct_time_in_rising, f.pct_time_in_hot, f.pct_time_in_top}) {
        if (!p) continue;
        CHECK(*p >= 0.0);
        CHECK(*p <= 1.0);
        sum += *p;
      }
      CHECK(sum <= 1.0 + 1e-12);
      if (f.engagement_auc) CHECK(*f.engagement_auc >= 0);
      if (f.half_life_minutes) {
        CHECK(*f.half_life_minutes > 0);
        CHECK(*f.half_life_minutes <= w);
      }
      if (f.timing_entropy) {
        CHECK(*f.timing_entropy >= 0);
        CHECK(*f.timing_entropy <= std::log2(6.0) + 1e-12);
      }
    }
}

TEST_CASE("normalized volumes respect caps") {
  synth::SynthConfig c;
  c.n_posts = 100;
  const NormalizationCaps caps{50, 5, 1};
  for (const auto& r : synth::generate(c).records) {
    const auto f = extract_temporal(r, WindowSpec(420), caps);
    if (f.norm_score) CHECK(*f.norm_score <= 50);
    if (f.norm_num_comments) CHECK(*f.norm_num_comments <= 5);
    if (f.norm_num_crossposts) CHECK(*f.norm_num_crossposts <= 1);
  }
}

TEST_CASE("causality: truncating the future changes nothing") {
  synth::SynthConfig c;
  c.n_posts = 60;
  c.placement = synth::SignalPlacement::Mixed;
  const double ws[] = {30, 120, 420};
  for (const auto& r : synth::generate(c).records) {
    for (double w1 : ws)
      for (double w2 : ws) {
        if (w2 < w1) continue;
        auto cut = r;
        cut.snapshots = window_view(r, WindowSpec(w2));
        CHECK(row_of(cut, w1) == row_of(r, w1));
      }
  }
}

TEST_CASE("matrix column sets") {
  const std::vector<PostRecord> rs = {make_record("a", {0, 5}), make_record("b", {0, 5}), make_record("c", {0, 5})};
  const auto m = assemble_matrix(rs, WindowSpec(30), kHuge, {Modality::Temporal});
  CHECK(m.n_rows() == 3);
  CHECK(m.n_cols() == column_layout({Modality::Temporal}).size());
  for (const auto& col : m.columns) CHECK(col.modality == Modality::Temporal);

  const auto empty = assemble_matrix(rs, WindowSpec(30), kHuge, {});
  CHECK(empty.n_rows() == 3);
  CHECK(empty.n_cols() == 0);

  auto no_temporal = all_modalities();
  no_temporal.erase(Modality::Temporal);
  const auto ex = assemble_matrix(rs, WindowSpec(30), kHuge, no_temporal);
  for (const auto& col : ex.columns) CHECK(col.modality != Modality::Temporal);
  CHECK(ex.columns == assemble_matrix(rs, WindowSpec(30), kHuge, all_modalities()).select_modalities(no_temporal).columns);
}

TEST_CASE("column layout is ordered by modality then name and names are unique") {
  const auto cols = column_layout(all_modalities());
  std::set<std::string> names;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    names.insert(cols[i].name);
    if (i == 0) continue;
    const auto& a = cols[i - 1];
    const auto& b = cols[i];
    CHECK((a.modality < b.modality || (a.modality == b.modality && a.name < b.name)));
  }
  CHECK(names.size() == cols.size());
}

TEST_CASE("records without a static blob get missing static cells") {
  auto r = make_record("a", {0, 5});
  r.title = "";
  const auto m = assemble_matrix({r}, WindowSpec(30), kHuge, {Modality::Visual, Modality::Contextual});
  // media_type is known from the record itself
  for (std::size_t j = 0; j < m.n_cols(); ++j) CHECK(is_missing(m.rows[0][j]) == (m.columns[j].name != "media_type"));
  const auto t = assemble_matrix({make_record("b", {0})}, WindowSpec(30), kHuge, {Modality::Textual});
  // title-derived fields are filled in locally
  bool has_title_count = false;
  for (std::size_t j = 0; j < t.n_cols(); ++j)
    if (t.columns[j].name == "title_word_count") {
      has_title_count = true;
      CHECK(std::get<double>(t.rows[0][j]) == 3.0);
    }
  CHECK(has_title_count);
}

TEST_CASE("static blob values pass through") {
  auto r = make_record("a", {0, 5});
  r.static_features = virality::testing::mock_static_features(r);
  const auto m = assemble_matrix({r}, WindowSpec(30), kHuge, {Modality::Visual});
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    if (m.columns[j].name != "template_name") continue;
    CHECK(std::get<std::string>(m.rows[0][j]) == std::get<std::string>(r.static_features->at("template_name")));
  }
}

TEST_CASE("export and import round trip") {
  synth::SynthConfig c;
  c.n_posts = 50;
  c.static_missing_rate = 0.3;
  auto rs = synth::generate(c).records;
  rs[0].title = "comma, \"quoted\" title";
  const auto m = assemble_matrix(rs, WindowSpec(60), NormalizationCaps{300, 40, 2}, all_modalities());
  const auto dir = std::filesystem::temp_directory_path() / "virality_features_test";
  std::filesystem::create_directories(dir);
  export_matrix(m, dir / "m.csv", dir / "m.manifest.csv");
  const auto back = import_matrix(dir / "m.csv", dir / "m.manifest.csv");
  CHECK(back.row_ids == m.row_ids);
  CHECK(back.columns == m.columns);
  CHECK(back.rows == m.rows);
}
