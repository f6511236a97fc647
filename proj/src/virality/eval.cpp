// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "virality/common.hpp"
#include "virality/preprocess.hpp"
#include "virality/stats.hpp"

namespace virality::eval {

using nlohmann::json;

namespace {

void check_metric_input(const std::vector<int>& y, const std::vector<double>& s, std::size_t* pos, std::size_t* neg) {
  if (y.size() != s.size()) fail(ErrorKind::Metric, "labels and scores differ in length");
  std::size_t p = 0;
  for (int v : y) {
    if (v != 0 && v != 1) fail(ErrorKind::Metric, "labels must be 0 or 1");
    p += static_cast<std::size_t>(v);
  }
  for (double v : s)
    if (std::isnan(v)) fail(ErrorKind::Metric, "score is NaN");
  if (p == 0 || p == y.size()) fail(ErrorKind::Metric, "metric undefined: only one class present");
  *pos = p;
  *neg = y.size() - p;
}

std::vector<std::size_t> descending(const std::vector<double>& s) {
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

}  // namespace

double pr_auc(const std::vector<int>& y, const std::vector<double>& scores) {
  std::size_t P = 0, N = 0;
  check_metric_input(y, scores, &P, &N);
  const auto order = descending(scores);
  double tp = 0, fp = 0, ap = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double block_pos = 0, block_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (y[order[j]] ? block_pos : block_neg) += 1;
      ++j;
    }
    tp += block_pos;
    fp += block_neg;
    if (block_pos > 0) ap += (tp / (tp + fp)) * block_pos;
    i = j;
  }
  return std::min(1.0, ap / static_cast<double>(P));
}

double roc_auc(const std::vector<int>& y, const std::vector<double>& scores) {
  std::size_t P = 0, N = 0;
  check_metric_input(y, scores, &P, &N);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (y[order[k]]) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(P), n = static_cast<double>(N);
  return (rank_sum - p * (p + 1) / 2) / (p * n);
}

double f1_at_threshold(const std::vector<int>& y, const std::vector<double>& probs, double threshold) {
  if (y.size() != probs.size()) fail(ErrorKind::Metric, "labels and probabilities differ in length");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    if (pred && y[i]) ++tp;
    if (pred && !y[i]) ++fp;
    if (!pred && y[i]) ++fn;
  }
  if (tp + fp == 0 || tp == 0) return 0.0;
  return 2 * tp / (2 * tp + fp + fn);
}

MetricReport evaluate(const std::vector<int>& y, const std::vector<double>& probs, double threshold) {
  MetricReport r;
  r.pr_auc = pr_auc(y, probs);
  r.roc_auc = roc_auc(y, probs);
  r.f1 = f1_at_threshold(y, probs, threshold);
  for (int v : y) (v ? r.n_pos : r.n_neg)++;
  return r;
}

SplitAssignment chronological_split(const std::vector<PostRecord>& records, double train_frac) {
  const std::size_t n = records.size();
  if (n < 2) fail(ErrorKind::Split, "need at least two records to split");
  if (!(train_frac > 0 && train_frac < 1)) fail(ErrorKind::Split, "train fraction must lie in (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].created_utc != records[b].created_utc) return records[a].created_utc < records[b].created_utc;
    return records[a].post_id < records[b].post_id;
  });
  auto cut = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));
  cut = std::clamp<std::size_t>(cut, 1, n);
  while (cut < n && records[order[cut]].created_utc == records[order[cut - 1]].created_utc) ++cut;
  if (cut >= n) fail(ErrorKind::Split, "no valid chronological boundary");
  SplitAssignment s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  s.boundary = records[order[cut]].created_utc;
  return s;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::Fold, "k must be at least 2");
  std::vector<std::size_t> cls[2];
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) fail(ErrorKind::Fold, "labels must be 0 or 1");
    cls[y[i]].push_back(i);
  }
  for (const auto& c : cls)
    if (c.size() < static_cast<std::size_t>(k))
      fail(ErrorKind::Fold, "a class has fewer members (" + std::to_string(c.size()) + ") than folds");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t offset = 0;
  for (auto& c : cls) {
    std::shuffle(c.begin(), c.end(), rng);
    for (std::size_t r = 0; r < c.size(); ++r) folds[(offset + r) % static_cast<std::size_t>(k)].push_back(c[r]);
    offset += c.size();
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CvReport cross_validate(const models::ModelConfig& config, const features::FeatureMatrix& matrix,
                        const std::vector<int>& y, int k, std::uint64_t seed, double threshold) {
  if (matrix.n_rows() != y.size()) fail(ErrorKind::Fold, "matrix rows and labels differ in length");
  const auto folds = stratified_kfold(y, k, seed);
  CvReport rep;
  for (const auto& held : folds) {
    std::vector<std::size_t> train_idx;
    std::vector<char> is_held(y.size(), 0);
    for (std::size_t i : held) is_held[i] = 1;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!is_held[i]) train_idx.push_back(i);
    const auto train_m = matrix.select_rows(train_idx);
    const auto test_m = matrix.select_rows(held);
    const auto pre = preprocess::fit(train_m);
    rep.preprocess_fingerprints.push_back(preprocess::fingerprint(pre));
    const auto dtrain = preprocess::transform(pre, train_m);
    const auto dtest = preprocess::transform(pre, test_m);
    std::vector<int> ytr, yte;
    for (std::size_t i : train_idx) ytr.push_back(y[i]);
    for (std::size_t i : held) yte.push_back(y[i]);
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = models::train(config, dtrain.X, ytr, dtrain.names);
    rep.train_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const models::Vector p = models::predict_proba(*model, dtest.X, dtest.names);
    rep.folds.push_back(evaluate(yte, std::vector<double>(p.data(), p.data() + p.size()), threshold));
  }
  auto agg = [&](double MetricReport::*field, double* mean, double* sd) {
    std::vector<double> v;
    for (const auto& f : rep.folds) v.push_back(f.*field);
    *mean = stats::mean(v);
    *sd = stats::population_std(v);
  };
  agg(&MetricReport::pr_auc, &rep.mean.pr_auc, &rep.std.pr_auc);
  agg(&MetricReport::roc_auc, &rep.mean.roc_auc, &rep.std.roc_auc);
  agg(&MetricReport::f1, &rep.mean.f1, &rep.std.f1);
  for (const auto& f : rep.folds) {
    rep.mean.n_pos += f.n_pos;
    rep.mean.n_neg += f.n_neg;
  }
  return rep;
}

json to_json(const MetricReport& r) {
  return {{"pr_auc", r.pr_auc}, {"roc_auc", r.roc_auc}, {"f1", r.f1}, {"n_pos", r.n_pos}, {"n_neg", r.n_neg}};
}

json to_json(const CvReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  return {{"mean", to_json(r.mean)},
          {"std", {{"pr_auc", r.std.pr_auc}, {"roc_auc", r.std.roc_auc}, {"f1", r.std.f1}}},
          {"folds", std::move(folds)},
          {"preprocess_fingerprints", r.preprocess_fingerprints},
          {"train_seconds", r.train_seconds}};
}

}  // namespace virality::eval
