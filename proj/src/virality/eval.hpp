// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "virality/features.hpp"
#include "virality/ingest.hpp"
#include "virality/models.hpp"

namespace virality::eval {

/// Average precision; tied scores enter as one block. Throws Metric unless
/// both classes are present.
double pr_auc(const std::vector<int>& y, const std::vector<double>& scores);

/// Mann-Whitney estimate with average ranks for ties.
double roc_auc(const std::vector<int>& y, const std::vector<double>& scores);

/// F1 of the rule prob >= threshold; 0 when nothing is predicted positive.
double f1_at_threshold(const std::vector<int>& y, const std::vector<double>& probs, double threshold = 0.5);

struct MetricReport {
  double pr_auc = 0, roc_auc = 0, f1 = 0;
  std::size_t n_pos = 0, n_neg = 0;
};

MetricReport evaluate(const std::vector<int>& y, const std::vector<double>& probs, double threshold = 0.5);

struct SplitAssignment {
  std::vector<std::size_t> train, test;  ///< indices into the input
  std::int64_t boundary = 0;             ///< created_utc of the first test post
};

/// Earliest floor(train_frac * n) posts by (created_utc, post_id) train; the
/// cut moves forward past tied timestamps. Throws Split when no boundary exists.
SplitAssignment chronological_split(const std::vector<PostRecord>& records, double train_frac = 0.8);

/// Held-out index sets, one per fold, each sorted. Throws Fold if k < 2 or a
/// class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed);

struct CvReport {
  std::vector<MetricReport> folds;
  MetricReport mean, std;
  std::vector<std::string> preprocess_fingerprints;
  double train_seconds = 0;
};

/// Per fold: fit preprocessing on the training folds only, train, score the
/// held fold.
CvReport cross_validate(const models::ModelConfig& config, const features::FeatureMatrix& matrix,
                        const std::vector<int>& y, int k, std::uint64_t seed, double threshold = 0.5);

nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const CvReport& r);

}  // namespace virality::eval
