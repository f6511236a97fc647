// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "virality/eval.hpp"
#include "virality/features.hpp"
#include "virality/labeling.hpp"
#include "virality/models.hpp"
#include "virality/preprocess.hpp"

namespace virality::experiments {

struct ExperimentConfig {
  std::vector<double> windows{std::begin(features::kSweepWindows), std::end(features::kSweepWindows)};
  std::vector<models::ModelKind> models = {models::ModelKind::LogReg, models::ModelKind::Gbt, models::ModelKind::Mlp};
  /// Hyperparameter overrides per model kind.
  std::map<models::ModelKind, nlohmann::json> hyper;
  double train_frac = 0.8;
  int cv_folds = 5;
  bool run_cv = true;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  double decision_threshold = 0.5;
  labeling::LabelingConfig labeling;
  std::set<Modality> modalities = features::all_modalities();
  double ablation_window = 120;
  int top_k = 30;
  models::ImportanceType importance = models::ImportanceType::Gain;
};

nlohmann::json to_json(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

models::ModelConfig model_config(const ExperimentConfig& c, models::ModelKind kind);

/// Records with a chronological split and labels from artifacts fitted on
/// the training part only.
struct PreparedData {
  std::vector<PostRecord> records;
  eval::SplitAssignment split;
  labeling::LabelingArtifacts labeling;
  std::vector<int> y;  ///< aligned with records
};

PreparedData prepare(std::vector<PostRecord> records, const ExperimentConfig& c);
/// Reuses previously fitted artifacts (labels are recomputed from them).
PreparedData prepare_with(std::vector<PostRecord> records, const ExperimentConfig& c,
                          const labeling::LabelingArtifacts& artifacts);

/// Feature matrix for one window, rows aligned with PreparedData::records.
using MatrixProvider = std::function<features::FeatureMatrix(double window)>;

MatrixProvider extracting_provider(const PreparedData& data, const std::set<Modality>& modalities);
/// Reads matrices written by write_feature_files; rows are reordered to
/// match `data.records` and must cover every record.
MatrixProvider precomputed_provider(const PreparedData& data, const std::filesystem::path& dir);

std::string window_tag(double window);
std::filesystem::path feature_csv_path(const std::filesystem::path& dir, double window);
std::filesystem::path feature_manifest_path(const std::filesystem::path& dir, double window);
void write_feature_files(const std::filesystem::path& dir, const PreparedData& data, const std::vector<double>& windows,
                         const std::set<Modality>& modalities, unsigned jobs = 1);

/// One trained and evaluated (window, model) combination.
struct CellResult {
  double window = 0;
  models::ModelKind model = models::ModelKind::Gbt;
  eval::MetricReport test;
  std::optional<eval::CvReport> cv;
  double duration_seconds = 0;
  std::string preprocess_fingerprint;
  std::string model_fingerprint;
  /// Parent-feature importances (sum over one-hot children) with modality.
  std::vector<std::pair<std::string, double>> parent_importance;
  std::map<std::string, Modality> parent_modality;
};

struct TrainedCell {
  preprocess::PreprocessModel preprocess;
  std::unique_ptr<models::TrainedModel> model;
  preprocess::Design train_design;
};

/// Fits preprocessing and the model on the training rows of `matrix`.
TrainedCell train_cell(const PreparedData& data, const features::FeatureMatrix& matrix, const models::ModelConfig& mc);

CellResult run_cell(const PreparedData& data, const features::FeatureMatrix& matrix, double window,
                    const ExperimentConfig& c, models::ModelKind kind, bool with_cv);

std::vector<CellResult> run_window_sweep(const PreparedData& data, const ExperimentConfig& c,
                                         const MatrixProvider& provider);

struct AblationRow {
  std::string excluded;  ///< "none" for the baseline
  eval::MetricReport test;
};

std::vector<AblationRow> run_ablation(const PreparedData& data, const ExperimentConfig& c,
                                      const MatrixProvider& provider);

struct ImportanceWindow {
  double window = 0;
  std::map<Modality, int> counts;
  std::vector<std::pair<std::string, double>> ranked;  ///< top-k parents
};

std::vector<ImportanceWindow> importance_over_time(const PreparedData& data, const ExperimentConfig& c,
                                                   const MatrixProvider& provider);
/// Modality counts among the top-k parent features.
ImportanceWindow count_top_k(double window, std::vector<std::pair<std::string, double>> parent_importance,
                             const std::map<std::string, Modality>& modality, int top_k);

// ---------------------------------------------------------------------------
// Reports

void write_sweep_reports(const std::filesystem::path& dir, const std::vector<CellResult>& rows);
void write_ablation_report(const std::filesystem::path& dir, double window, const std::vector<AblationRow>& rows);
void write_importance_reports(const std::filesystem::path& dir, const std::vector<ImportanceWindow>& rows);
/// Virality rate per language, hour, weekday, media type, template, topic and
/// meme type.
void write_group_rates(const std::filesystem::path& dir, const std::vector<PostRecord>& records,
                       const std::vector<int>& y);
void write_labels_csv(const std::filesystem::path& path, const PreparedData& data);

nlohmann::json manifest(const PreparedData& data, const ExperimentConfig& c, const std::string& command);
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& m);

}  // namespace virality::experiments
