// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support/mock_static.hpp"
#include "virality/common.hpp"
#include "virality/labeling.hpp"
#include "virality/stats.hpp"
#include "virality/synth.hpp"

using namespace virality;
using namespace virality::labeling;
using virality::testing::make_record;

namespace {

PostRecord with_final(const std::string& id, std::int64_t score, std::int64_t comments, std::int64_t subscribers) {
  auto r = make_record(id, {0, 1440});
  r.subreddit.subscribers = subscribers;
  r.snapshots.back().score = score;
  r.snapshots.back().comments = comments;
  r.snapshots.back().crossposts = 0;
  r.snapshots.front().score = 0;
  r.snapshots.front().comments = 0;
  return r;
}

// textbook linear-interpolation percentile, written independently
double oracle_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST_CASE("normalize_metric") {
  CHECK(normalize_metric(0, 12345, 10) == 0.0);
  CHECK(normalize_metric(500, 1'000'000, 1000) == doctest::Approx(50.0));
  CHECK(normalize_metric(10'000, 10'000, 75) == 75.0);
  CHECK(normalize_metric(-5, 100, 10) == 0.0);
  CHECK_THROWS_AS(normalize_metric(1, 0, 10), Error);
  CHECK_THROWS_AS(normalize_metric(1, 10, 0), Error);
}

TEST_CASE("p99 caps, linear rule") {
  std::vector<PostRecord> rs;
  std::vector<double> vals;
  for (int i = 1; i <= 100; ++i) {
    rs.push_back(with_final("p" + std::to_string(i), i, 1, 100000));
    vals.push_back(i);
  }
  const auto caps = fit_p99_caps(rs);
  CHECK(caps.score == doctest::Approx(99.01));
  CHECK(caps.score == doctest::Approx(oracle_percentile(vals, 99)));
  CHECK(caps.comments == doctest::Approx(1.0));
  CHECK(caps.crossposts == 1.0);  // all zero: falls back to 1

  std::vector<PostRecord> same(7, with_final("x", 40, 3, 200000));
  CHECK(fit_p99_caps(same).score == doctest::Approx(20.0));
  CHECK(fit_p99_caps({with_final("one", 33, 1, 100000)}).score == doctest::Approx(33.0));
  CHECK_THROWS_AS(fit_p99_caps({}), Error);
}

TEST_CASE("p99 caps ignore record order") {
  synth::SynthConfig c;
  c.n_posts = 120;
  auto rs = synth::generate(c).records;
  const auto a = fit_p99_caps(rs);
  std::shuffle(rs.begin(), rs.end(), std::mt19937_64(1));
  CHECK(fit_p99_caps(rs) == a);
}

TEST_CASE("preliminary target") {
  std::vector<double> sums(100);
  std::vector<std::string> ids(100);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    sums[static_cast<std::size_t>(i)] = std::uniform_real_distribution<>(0, 1)(rng);
    ids[static_cast<std::size_t>(i)] = "id" + std::to_string(1000 + i);
  }
  const auto y = make_preliminary_target(sums, ids, 0.05);
  CHECK(std::accumulate(y.begin(), y.end(), 0) == 5);
  auto sorted = sums;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t i = 0; i < 100; ++i) CHECK(y[i] == (sums[i] >= sorted[4] ? 1 : 0));

  const auto tied = make_preliminary_target(std::vector<double>(100, 1.0), ids, 0.05);
  for (std::size_t i = 0; i < 100; ++i) CHECK(tied[i] == (i < 5 ? 1 : 0));

  CHECK(make_preliminary_target({1.0, 2.0}, {"a", "b"}, 0.5) == std::vector<int>{0, 1});
  // 0.05 * 30 = 1.5 -> 2 positives
  const auto thirty = make_preliminary_target(std::vector<double>(30, 0.0), std::vector<std::string>(30, "z"), 0.05);
  CHECK(std::accumulate(thirty.begin(), thirty.end(), 0) == 2);
}

TEST_CASE("hybrid score") {
  const auto w = published_weights();
  CHECK(w.weights.at("score") == 1.0);
  CHECK(w.weights.at("comments") == 0.44);
  CHECK(w.weights.at("peak_velocity") == 0.14);
  const EngagementFeatures f = {{"score", 100}, {"comments", 50}, {"peak_velocity", 10}};
  CHECK(hybrid_score(f, w) == doctest::Approx(123.4));
  EngagementFeatures zero = {{"score", 0}, {"comments", 0}, {"peak_velocity", 0}};
  CHECK(hybrid_score(zero, w) == 0.0);
  EngagementFeatures twice;
  for (const auto& [k, v] : f) twice[k] = 2 * v;
  CHECK(hybrid_score(twice, w) == doctest::Approx(2 * hybrid_score(f, w)));
  CHECK_THROWS_AS(hybrid_score({{"score", 1}}, w), Error);
  CHECK_THROWS_AS(hybrid_score({{"score", 1}, {"comments", 1}, {"other", 1}}, w), Error);
  EngagementFeatures extra = f;
  extra["crossposts"] = 7;
  CHECK(hybrid_score_subset(extra, w) == doctest::Approx(123.4));
}

TEST_CASE("k-means threshold") {
  const auto t = fit_threshold({0, 0, 0, 1000, 1000});
  CHECK(t.low == doctest::Approx(0));
  CHECK(t.high == doctest::Approx(1000));
  CHECK(t.tau == doctest::Approx(500));
  CHECK(t.low < t.tau);
  CHECK(t.tau < t.high);
  try {
    fit_threshold({4, 4, 4});
    FAIL("expected degenerate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  CHECK_THROWS_AS(fit_threshold({}), Error);
}

TEST_CASE("k-means two gaussians") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> a(0, 1), b(100, 1);
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(a(rng));
  for (int i = 0; i < 1000; ++i) v.push_back(b(rng));
  const double tau = fit_threshold(v).tau;
  CHECK(tau >= 45);
  CHECK(tau <= 55);
}

TEST_CASE("assign label") {
  CHECK(assign_label(3.5, 3.5));
  CHECK_FALSE(assign_label(std::nextafter(3.5, 0.0), 3.5));
  for (double a = -2; a < 2; a += 0.25)
    for (double b = a; b < 2; b += 0.25) CHECK(assign_label(a, 0.1) <= assign_label(b, 0.1));
}

TEST_CASE("weights: planted score signal") {
  // preliminary target follows the score column only
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t n = 800;
  std::vector<double> sig(n);
  for (auto& s : sig) s = u(rng);
  auto sorted = sig;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> prelim(n);
  for (std::size_t i = 0; i < n; ++i) prelim[i] = sig[i] >= sorted[n - 40];
  std::vector<models::Matrix> mats;
  for (int w = 0; w < 3; ++w) {
    models::Matrix X(static_cast<Eigen::Index>(n), 6);
    for (std::size_t i = 0; i < n; ++i) {
      X(static_cast<Eigen::Index>(i), 0) = sig[i];
      for (int j = 1; j < 6; ++j) X(static_cast<Eigen::Index>(i), j) = u(rng);
    }
    mats.push_back(X);
  }
  models::ForestParams fp;
  fp.n_trees = 60;
  const auto hw = weights_from_matrices(mats, kLabelFeatureNames, prelim, fp, {30, 60, 120});
  CHECK(hw.weights.at("score") == 1.0);
  for (const auto& [k, v] : hw.weights) {
    CHECK(v >= 0.0);
    if (k != "score") CHECK(v < 0.2);
  }
  CHECK(hw.source_windows == std::vector<double>{30, 60, 120});
  CHECK_THROWS_AS(weights_from_matrices(mats, kLabelFeatureNames, std::vector<int>(n, 0), fp, {30, 60, 120}), Error);
}

TEST_CASE("weights: duplicated informative column splits its importance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  const Eigen::Index n = 800;
  models::Matrix single(n, 4), dup(n, 5);
  models::Labels y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = u(rng);
    y[static_cast<std::size_t>(i)] = s > 0.9;
    single(i, 0) = s;
    dup(i, 0) = s;
    dup(i, 1) = s;
    for (int j = 1; j < 4; ++j) {
      const double noise = u(rng);
      single(i, j) = noise;
      dup(i, j + 1) = noise;
    }
  }
  models::ForestParams fp;
  fp.n_trees = 150;
  fp.max_features = 2;
  fp.seed = 3;
  const auto a = models::RandomForest::fit(single, y, fp).importances();
  const auto b = models::RandomForest::fit(dup, y, fp).importances();
  CHECK(std::abs((b[0] + b[1]) - a[0]) <= 0.1);
}

TEST_CASE("final features use the whole series, window features stop at the window") {
  auto r = make_record("a", {0, 30, 60, 1440});
  r.snapshots[0].score = 0;
  r.snapshots[1].score = 10;
  r.snapshots[2].score = 20;
  r.snapshots[3].score = 500;
  const NormalizationCaps caps{1e9, 1e9, 1e9};
  CHECK(final_engagement_features(r, caps).at("score") == doctest::Approx(500));
  CHECK(window_engagement_features(r, caps, 30).at("score") == doctest::Approx(10));
  for (const auto& k : kLabelFeatureNames) CHECK(final_engagement_features(r, caps).count(k) == 1);
}

TEST_CASE("labeling is fitted on the training records only") {
  synth::SynthConfig c;
  c.n_posts = 400;
  c.seed = 8;
  const auto rs = synth::generate(c).records;
  const std::vector<PostRecord> train(rs.begin(), rs.begin() + 300);
  LabelingConfig lc;
  lc.forest.n_trees = 30;
  const auto a = fit_labeling(train, lc);
  auto test = std::vector<PostRecord>(rs.begin() + 300, rs.end());
  for (auto& r : test)
    for (auto& s : r.snapshots) s.score *= 7;
  const auto b = fit_labeling(train, lc);
  CHECK(serialize(a) == serialize(b));
  CHECK(a.threshold.low < a.threshold.tau);
  CHECK(a.threshold.tau < a.threshold.high);
  double mx = 0;
  for (const auto& [k, v] : a.weights.weights) mx = std::max(mx, v);
  CHECK(mx == 1.0);
}

TEST_CASE("published preset skips weight learning") {
  synth::SynthConfig c;
  c.n_posts = 200;
  const auto rs = synth::generate(c).records;
  LabelingConfig lc;
  lc.preset = published_weights();
  const auto a = fit_labeling(rs, lc);
  CHECK(a.weights == published_weights());
  const auto labels = apply_labeling(a, rs);
  const auto scores = hybrid_scores(a, rs);
  for (std::size_t i = 0; i < rs.size(); ++i) CHECK(labels[i] == (scores[i] >= a.threshold.tau ? 1 : 0));
}

TEST_CASE("artifacts serialize and parse back") {
  synth::SynthConfig c;
  c.n_posts = 200;
  LabelingConfig lc;
  lc.forest.n_trees = 20;
  const auto a = fit_labeling(synth::generate(c).records, lc);
  const auto text = serialize(a);
  const auto back = artifacts_from_json(nlohmann::json::parse(text));
  CHECK(back == a);
  CHECK(serialize(back) == text);
  auto bad = nlohmann::json::parse(text);
  bad["format_version"] = 99;
  CHECK_THROWS_AS(artifacts_from_json(bad), Error);
}

TEST_CASE("positive rate on a planted heavy tail") {
  synth::SynthConfig c;
  c.n_posts = 1000;
  c.seed = 31;
  const auto corpus = synth::generate(c);
  LabelingConfig lc;
  lc.forest.n_trees = 40;
  const auto a = fit_labeling(corpus.records, lc);
  const auto y = apply_labeling(a, corpus.records);
  const double rate = static_cast<double>(std::accumulate(y.begin(), y.end(), 0)) / 1000.0;
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.10);
}
