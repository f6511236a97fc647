// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "virality/common.hpp"
#include "virality/experiments.hpp"
#include "virality/ingest.hpp"
#include "virality/stats.hpp"
#include "virality/synth.hpp"

using namespace virality;
namespace ex = virality::experiments;

namespace {

ex::ExperimentConfig quick_config() {
  ex::ExperimentConfig c;
  c.windows = {30, 120};
  c.models = {models::ModelKind::Gbt};
  c.hyper[models::ModelKind::Gbt] = {{"n_rounds", 20}, {"max_depth", 3}};
  c.run_cv = false;
  c.labeling.forest.n_trees = 20;
  c.seed = 4;
  return c;
}

ex::PreparedData quick_data(std::size_t n = 600) {
  synth::SynthConfig s;
  s.n_posts = n;
  s.seed = 12;
  return ex::prepare(synth::generate(s).records, quick_config());
}

}  // namespace

TEST_CASE("synth: planted positives are exact") {
  synth::SynthConfig c;
  c.seed = 7;
  const auto corpus = synth::generate(c);
  CHECK(corpus.records.size() == 1000);
  CHECK(std::accumulate(corpus.planted.begin(), corpus.planted.end(), 0) == 50);
}

TEST_CASE("synth: same seed, same bytes") {
  synth::SynthConfig c;
  c.n_posts = 80;
  c.seed = 19;
  const auto a = synth::generate(c), b = synth::generate(c);
  CHECK(a.records == b.records);
  CHECK(a.planted == b.planted);
  c.seed = 20;
  CHECK(synth::generate(c).records != a.records);
}

TEST_CASE("synth: every placement validates and passes the filters") {
  for (auto p : {synth::SignalPlacement::Temporal, synth::SignalPlacement::Network, synth::SignalPlacement::Static,
                 synth::SignalPlacement::Mixed}) {
    synth::SynthConfig c;
    c.n_posts = 150;
    c.placement = p;
    const auto rs = synth::generate(c).records;
    CHECK(validate_dataset(rs).empty());
    CHECK(apply_quality_filters(rs).size() == rs.size());
    CHECK(synth::placement_from_string(synth::to_string(p)) == p);
  }
}

TEST_CASE("synth: viral takeoff comes before the peak on average") {
  synth::SynthConfig c;
  c.n_posts = 2000;
  c.seed = 3;
  const auto corpus = synth::generate(c);
  // takeoff: first poll reaching a tenth of the final score; peak: largest per-minute gain
  std::vector<double> takeoff, peak;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (!corpus.planted[i]) continue;
    const auto& s = corpus.records[i].snapshots;
    const double final_score = static_cast<double>(s.back().score);
    double best = -1, at = 0, first = -1;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double v = static_cast<double>(s[k].score - s[k - 1].score) / (s[k].t_minutes - s[k - 1].t_minutes);
      if (v > best) {
        best = v;
        at = s[k].t_minutes;
      }
      if (first < 0 && static_cast<double>(s[k].score) >= 0.1 * final_score) first = s[k].t_minutes;
    }
    takeoff.push_back(first);
    peak.push_back(at);
  }
  REQUIRE_FALSE(takeoff.empty());
  CHECK(stats::mean(takeoff) < stats::mean(peak));
}

TEST_CASE("synth config json and validation") {
  synth::SynthConfig c;
  c.n_posts = 40;
  c.viral_frac = 0.25;
  const auto back = synth::synth_config_from_json(synth::to_json(c));
  CHECK(back.n_posts == 40);
  CHECK(back.viral_frac == 0.25);
  c.viral_frac = 1.5;
  CHECK_THROWS_AS(synth::validate_config(c), Error);
}

TEST_CASE("prepare labels every record and splits by time") {
  const auto d = quick_data();
  CHECK(d.y.size() == d.records.size());
  CHECK(d.split.train.size() + d.split.test.size() == d.records.size());
  const int pos = std::accumulate(d.y.begin(), d.y.end(), 0);
  CHECK(pos > 0);
  CHECK(pos < static_cast<int>(d.records.size()));
  const auto again = ex::prepare_with(d.records, quick_config(), d.labeling);
  CHECK(again.y == d.y);
}

TEST_CASE("single cell sweep gives one row, repeatable across job counts") {
  const auto d = quick_data();
  auto c = quick_config();
  c.windows = {60};
  const auto rows = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].window == 60);
  CHECK(rows[0].test.pr_auc >= 0);
  CHECK(rows[0].test.pr_auc <= 1);
  c.windows = {30, 120};
  c.jobs = 1;
  const auto a = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  c.jobs = 3;
  const auto b = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].window == b[i].window);
    CHECK(a[i].test.pr_auc == b[i].test.pr_auc);
    CHECK(a[i].model_fingerprint == b[i].model_fingerprint);
  }
}

TEST_CASE("sweep with cv reports folds") {
  const auto d = quick_data();
  auto c = quick_config();
  c.windows = {120};
  c.run_cv = true;
  c.cv_folds = 3;
  const auto rows = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  REQUIRE(rows[0].cv.has_value());
  CHECK(rows[0].cv->folds.size() == 3);
}

TEST_CASE("ablation baseline matches the sweep and empty modalities change nothing") {
  const auto d = quick_data();
  auto c = quick_config();
  c.ablation_window = 120;
  const auto provider = ex::extracting_provider(d, c.modalities);
  const auto rows = ex::run_ablation(d, c, provider);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].excluded == "none");
  c.windows = {120};
  const auto sweep = ex::run_window_sweep(d, c, provider);
  CHECK(rows[0].test.pr_auc == sweep[0].test.pr_auc);

  // a provider with no visual columns: removing visual is a no-op
  auto no_visual = c.modalities;
  no_visual.erase(Modality::Visual);
  const auto rows2 = ex::run_ablation(d, c, ex::extracting_provider(d, no_visual));
  for (const auto& r : rows2)
    if (r.excluded == "visual") CHECK(r.test.pr_auc == rows2[0].test.pr_auc);
}

TEST_CASE("top-k counting") {
  std::map<std::string, Modality> mod = {{"a", Modality::Temporal}, {"b", Modality::Network}, {"c", Modality::Visual},
                                         {"d", Modality::Temporal}};
  const auto w = ex::count_top_k(30, {{"a", 0.5}, {"b", 0.1}, {"c", 0.3}, {"d", 0.3}}, mod, 3);
  CHECK(w.counts.at(Modality::Temporal) == 2);
  CHECK(w.counts.at(Modality::Visual) == 1);
  CHECK(w.counts.at(Modality::Network) == 0);
  CHECK(w.counts.at(Modality::Textual) == 0);
  REQUIRE(w.ranked.size() == 3);
  CHECK(w.ranked[1].first == "c");  // tie broken by name
  const auto all = ex::count_top_k(30, {{"a", 0.5}, {"b", 0.1}}, mod, 30);
  int sum = 0;
  for (const auto& [m, n] : all.counts) sum += n;
  CHECK(sum == 2);
}

TEST_CASE("importance over time sums to min(k, columns)") {
  const auto d = quick_data();
  auto c = quick_config();
  c.top_k = 10;
  const auto rows = ex::importance_over_time(d, c, ex::extracting_provider(d, c.modalities));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    int sum = 0;
    for (const auto& [m, n] : r.counts) sum += n;
    CHECK(sum == 10);
  }
}

TEST_CASE("reports land on disk") {
  const auto d = quick_data(300);
  auto c = quick_config();
  const auto dir = std::filesystem::temp_directory_path() / "virality_reports_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto rows = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  ex::write_sweep_reports(dir, rows);
  ex::write_labels_csv(dir / "labels.csv", d);
  ex::write_manifest(dir, ex::manifest(d, c, "sweep"));
  std::ifstream f(dir / "window_sweep.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "window,model,pr_auc,roc_auc,f1,duration_seconds");
  int lines = 0;
  for (std::string l; std::getline(f, l);) lines += !l.empty();
  CHECK(lines == 2);
  CHECK(std::filesystem::exists(dir / "labels.csv"));
  const auto m = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  CHECK(m.at("command") == "sweep");
  CHECK(m.at("config_hash") == ex::config_hash(c));
}

TEST_CASE("precomputed features reproduce the extracted ones") {
  const auto d = quick_data(300);
  auto c = quick_config();
  const auto dir = std::filesystem::temp_directory_path() / "virality_precomputed_test";
  std::filesystem::remove_all(dir);
  ex::write_feature_files(dir, d, c.windows, c.modalities);
  const auto a = ex::run_window_sweep(d, c, ex::extracting_provider(d, c.modalities));
  const auto b = ex::run_window_sweep(d, c, ex::precomputed_provider(d, dir));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].test.pr_auc == b[i].test.pr_auc);
}
