// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "virality/common.hpp"
#include "virality/features.hpp"
#include "virality/stats.hpp"

namespace virality::labeling {

using nlohmann::json;

namespace {

const EngagementSnapshot& final_snapshot(const PostRecord& r) {
  if (r.snapshots.empty()) fail(ErrorKind::Validation, "post '" + r.post_id + "' has no snapshots");
  return r.snapshots.back();
}

double cap_or_fallback(std::vector<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  const double p99 = stats::percentile_linear(std::move(v), 99.0);
  if (p99 > 0) return p99;
  if (mx > 0) return mx;
  return 1.0;
}

}  // namespace

NormalizationCaps fit_p99_caps(const std::vector<PostRecord>& train) {
  if (train.empty()) fail(ErrorKind::Fit, "cannot fit caps on an empty training set");
  std::vector<double> s, c, x;
  for (const auto& r : train) {
    const auto& f = final_snapshot(r);
    s.push_back(per_100k(f.score, r.subreddit.subscribers));
    c.push_back(per_100k(f.comments, r.subreddit.subscribers));
    x.push_back(per_100k(f.crossposts, r.subreddit.subscribers));
  }
  return {cap_or_fallback(std::move(s)), cap_or_fallback(std::move(c)), cap_or_fallback(std::move(x))};
}

EngagementFeatures window_engagement_features(const PostRecord& r, const NormalizationCaps& caps,
                                              double window_minutes) {
  const auto tf = features::extract_temporal(r, features::WindowSpec(window_minutes), caps);
  return {{"score", tf.norm_score.value_or(0.0)},
          {"comments", tf.norm_num_comments.value_or(0.0)},
          {"crossposts", tf.norm_num_crossposts.value_or(0.0)},
          {"peak_velocity", tf.peak_velocity.value_or(0.0)},
          {"peak_acceleration", tf.peak_acceleration.value_or(0.0)},
          {"time_to_takeoff", tf.time_to_takeoff.value_or(0.0)}};
}

EngagementFeatures final_engagement_features(const PostRecord& r, const NormalizationCaps& caps) {
  const double horizon = final_snapshot(r).t_minutes;
  return window_engagement_features(r, caps, horizon > 0 ? horizon : 1.0);
}

double preliminary_sum(const PostRecord& r, const NormalizationCaps& caps) {
  const auto& f = final_snapshot(r);
  const auto N = r.subreddit.subscribers;
  return normalize_metric(f.score, N, caps.score) + normalize_metric(f.comments, N, caps.comments) +
         normalize_metric(f.crossposts, N, caps.crossposts);
}

std::vector<int> make_preliminary_target(const std::vector<double>& sums, const std::vector<std::string>& ids,
                                         double top_frac) {
  if (!(top_frac > 0 && top_frac < 1)) fail(ErrorKind::Domain, "top fraction must lie in (0, 1)");
  if (sums.size() != ids.size()) fail(ErrorKind::Fit, "sums and ids differ in length");
  const std::size_t n = sums.size();
  const auto k = static_cast<std::size_t>(std::ceil(top_frac * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] > sums[b];
    return ids[a] < ids[b];
  });
  std::vector<int> y(n, 0);
  for (std::size_t i = 0; i < std::min(k, n); ++i) y[order[i]] = 1;
  return y;
}

std::vector<int> make_preliminary_target(const std::vector<PostRecord>& train, const NormalizationCaps& caps,
                                         double top_frac) {
  std::vector<double> sums;
  std::vector<std::string> ids;
  for (const auto& r : train) {
    sums.push_back(preliminary_sum(r, caps));
    ids.push_back(r.post_id);
  }
  return make_preliminary_target(sums, ids, top_frac);
}

HybridWeights published_weights() { return {{{"score", 1.0}, {"comments", 0.44}, {"peak_velocity", 0.14}}, {}}; }

HybridWeights weights_from_matrices(const std::vector<models::Matrix>& per_window, const std::vector<std::string>& names,
                                    const std::vector<int>& prelim, const models::ForestParams& forest,
                                    std::vector<double> windows) {
  if (per_window.empty()) fail(ErrorKind::Fit, "no windows to learn weights from");
  std::vector<double> avg(names.size(), 0.0);
  for (std::size_t w = 0; w < per_window.size(); ++w) {
    models::ForestParams p = forest;
    p.seed = forest.seed + w;
    const auto rf = models::RandomForest::fit(per_window[w], prelim, p);
    const auto imp = rf.importances();
    if (imp.size() != names.size()) fail(ErrorKind::Schema, "importance width does not match feature names");
    for (std::size_t j = 0; j < imp.size(); ++j) avg[j] += imp[j] / static_cast<double>(per_window.size());
  }
  const double mx = *std::max_element(avg.begin(), avg.end());
  if (!(mx > 0)) fail(ErrorKind::Fit, "auxiliary forest found no informative feature");
  HybridWeights out;
  for (std::size_t j = 0; j < names.size(); ++j) out.weights[names[j]] = avg[j] / mx;
  out.source_windows = std::move(windows);
  return out;
}

HybridWeights learn_hybrid_weights(const std::vector<PostRecord>& train, const NormalizationCaps& caps,
                                   const std::vector<double>& windows, const std::vector<int>& prelim,
                                   const models::ForestParams& forest) {
  if (windows.empty()) fail(ErrorKind::Fit, "no windows to learn weights from");
  if (prelim.size() != train.size()) fail(ErrorKind::Fit, "preliminary target misaligned with training records");
  std::vector<models::Matrix> mats;
  for (double w : windows) {
    models::Matrix X(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(kLabelFeatureNames.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      const auto f = window_engagement_features(train[i], caps, w);
      for (std::size_t j = 0; j < kLabelFeatureNames.size(); ++j)
        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.at(kLabelFeatureNames[j]);
    }
    mats.push_back(std::move(X));
  }
  return weights_from_matrices(mats, kLabelFeatureNames, prelim, forest, windows);
}

double hybrid_score(const EngagementFeatures& f, const HybridWeights& w) {
  if (f.size() != w.weights.size()) fail(ErrorKind::Schema, "feature keys do not match weight keys");
  double s = 0;
  for (const auto& [k, beta] : w.weights) {
    auto it = f.find(k);
    if (it == f.end()) fail(ErrorKind::Schema, "feature '" + k + "' has a weight but no value");
    s += beta * it->second;
  }
  return s;
}

double hybrid_score_subset(const EngagementFeatures& f, const HybridWeights& w) {
  EngagementFeatures sub;
  for (const auto& [k, beta] : w.weights) {
    auto it = f.find(k);
    if (it == f.end()) fail(ErrorKind::Schema, "weight '" + k + "' has no matching engagement feature");
    sub.emplace(k, it->second);
  }
  return hybrid_score(sub, w);
}

ViralityThreshold fit_threshold(const std::vector<double>& scores, int max_iter) {
  if (scores.empty()) fail(ErrorKind::Degenerate, "no scores to cluster");
  for (double s : scores)
    if (!std::isfinite(s)) fail(ErrorKind::Domain, "non-finite hybrid score");
  const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
  if (*mn == *mx) fail(ErrorKind::Degenerate, "all scores are identical; no threshold can separate them");

  double lo = stats::percentile_linear(scores, 10.0);
  double hi = stats::percentile_linear(scores, 90.0);
  if (!(lo < hi)) {
    lo = *mn;
    hi = *mx;
  }
  std::vector<char> assign(scores.size(), 2);
  int it = 0;
  for (; it < max_iter; ++it) {
    bool changed = false;
    double sum[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const char a = std::abs(scores[i] - lo) <= std::abs(scores[i] - hi) ? 0 : 1;
      if (a != assign[i]) changed = true;
      assign[i] = a;
      sum[static_cast<int>(a)] += scores[i];
      ++cnt[static_cast<int>(a)];
    }
    if (!changed) break;
    if (cnt[0]) lo = sum[0] / static_cast<double>(cnt[0]);
    if (cnt[1]) hi = sum[1] / static_cast<double>(cnt[1]);
  }
  ViralityThreshold t;
  t.low = lo;
  t.high = hi;
  t.tau = 0.5 * (lo + hi);
  t.iterations = it;
  return t;
}

LabelingArtifacts fit_labeling(const std::vector<PostRecord>& train, const LabelingConfig& config) {
  LabelingArtifacts a;
  a.caps = fit_p99_caps(train);
  if (config.preset) {
    a.weights = *config.preset;
  } else {
    const auto prelim = make_preliminary_target(train, a.caps, config.top_frac);
    a.weights = learn_hybrid_weights(train, a.caps, config.windows, prelim, config.forest);
  }
  a.training_fingerprint = dataset_fingerprint(train);
  a.threshold = fit_threshold(hybrid_scores(a, train));
  a.threshold.fitted_on = a.training_fingerprint;
  return a;
}

std::vector<double> hybrid_scores(const LabelingArtifacts& a, const std::vector<PostRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(hybrid_score_subset(final_engagement_features(r, a.caps), a.weights));
  return out;
}

std::vector<int> apply_labeling(const LabelingArtifacts& a, const std::vector<PostRecord>& records) {
  std::vector<int> y;
  for (double s : hybrid_scores(a, records)) y.push_back(assign_label(s, a.threshold.tau) ? 1 : 0);
  return y;
}

json to_json(const HybridWeights& w) { return {{"weights", w.weights}, {"source_windows", w.source_windows}}; }

HybridWeights weights_from_json(const json& j) {
  HybridWeights w;
  try {
    w.weights = j.at("weights").get<std::map<std::string, double>>();
    w.source_windows = j.value("source_windows", std::vector<double>{});
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed hybrid weights: ") + e.what());
  }
  for (const auto& [k, v] : w.weights)
    if (!(v >= 0) || !std::isfinite(v)) fail(ErrorKind::Parse, "hybrid weight '" + k + "' must be non-negative");
  return w;
}

json to_json(const LabelingArtifacts& a) {
  return {{"format_version", kLabelingFormatVersion},
          {"caps", virality::to_json(a.caps)},
          {"weights", to_json(a.weights)},
          {"threshold",
           {{"tau", a.threshold.tau},
            {"low", a.threshold.low},
            {"high", a.threshold.high},
            {"iterations", a.threshold.iterations},
            {"fitted_on", a.threshold.fitted_on}}},
          {"training_fingerprint", a.training_fingerprint}};
}

LabelingArtifacts artifacts_from_json(const json& j) {
  LabelingArtifacts a;
  try {
    if (j.at("format_version").get<int>() != kLabelingFormatVersion)
      fail(ErrorKind::Parse, "unsupported labeling artifact version");
    a.caps = caps_from_json(j.at("caps"));
    a.weights = weights_from_json(j.at("weights"));
    const json& t = j.at("threshold");
    a.threshold.tau = t.at("tau").get<double>();
    a.threshold.low = t.at("low").get<double>();
    a.threshold.high = t.at("high").get<double>();
    a.threshold.iterations = t.at("iterations").get<int>();
    a.threshold.fitted_on = t.at("fitted_on").get<std::string>();
    a.training_fingerprint = j.at("training_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed labeling artifacts: ") + e.what());
  }
  return a;
}

std::string serialize(const LabelingArtifacts& a) { return to_json(a).dump(2) + "\n"; }

}  // namespace virality::labeling
