// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace virality::models {

/// Rows are samples.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

enum class ModelKind { LogReg, Gbt, Mlp, RandomForest };

std::string_view to_string(ModelKind k) noexcept;
std::optional<ModelKind> model_kind_from_string(std::string_view s) noexcept;

/// Numerically stable logistic function.
double sigmoid(double z) noexcept;

/// Throws Fit unless y is binary, aligned with X and holds both classes;
/// throws Domain on non-finite inputs.
void check_training_data(const Matrix& X, const Labels& y);

/// Balanced class weights n / (2 n_c), per sample.
std::vector<double> balanced_sample_weights(const Labels& y);

// ---------------------------------------------------------------------------

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  virtual ModelKind kind() const noexcept = 0;
  /// Positive-class probability per row. Throws Schema on a column-count mismatch.
  virtual Vector predict_proba(const Matrix& X) const = 0;
  /// Non-negative, aligned with the training columns; empty when the model
  /// has no native importance.
  virtual std::vector<double> importances() const { return {}; }
  virtual nlohmann::json params_to_json() const = 0;

  std::size_t n_features() const noexcept { return n_features_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  void set_feature_names(std::vector<std::string> names);
  const nlohmann::json& config() const noexcept { return config_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_provenance(nlohmann::json config, std::uint64_t seed) {
    config_ = std::move(config);
    seed_ = seed;
  }

 protected:
  void check_columns(const Matrix& X) const;
  std::size_t n_features_ = 0;

 private:
  std::vector<std::string> feature_names_;
  nlohmann::json config_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
};

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegParams {
  double C = 1.0;
  bool balanced = true;
  double tol = 1e-6;
  int max_iter = 10000;
};

/// Minimizes 0.5 |w|^2 + C * sum_i s_i * logloss_i with an unpenalized
/// intercept, by damped Newton steps.
class LogisticRegression final : public TrainedModel {
 public:
  static LogisticRegression fit(const Matrix& X, const Labels& y, const LogRegParams& p = {});
  static LogisticRegression fit_weighted(const Matrix& X, const Labels& y, const std::vector<double>& sample_weight,
                                         const LogRegParams& p);
  LogisticRegression() = default;
  LogisticRegression(Vector coef, double intercept);

  ModelKind kind() const noexcept override { return ModelKind::LogReg; }
  Vector decision_function(const Matrix& X) const;
  Vector predict_proba(const Matrix& X) const override;
  std::vector<double> importances() const override;
  nlohmann::json params_to_json() const override;
  static LogisticRegression from_json(const nlohmann::json& j);

  const Vector& coef() const noexcept { return coef_; }
  double intercept() const noexcept { return intercept_; }
  int iterations() const noexcept { return iterations_; }
  double final_gradient_norm() const noexcept { return grad_norm_; }

 private:
  Vector coef_;
  double intercept_ = 0.0;
  int iterations_ = 0;
  double grad_norm_ = 0.0;
};

// ---------------------------------------------------------------------------
// Gradient-boosted trees

struct GbtParams {
  int n_rounds = 100;
  int max_depth = 6;
  double eta = 0.3;
  double min_child_weight = 1.0;
  double lambda = 1.0;
  double gamma = 0.0;
  /// Per-positive weight; negatives/positives when unset.
  std::optional<double> scale_pos_weight;
};

enum class ImportanceType { Gain, Cover, Frequency };
std::string_view to_string(ImportanceType t) noexcept;
std::optional<ImportanceType> importance_type_from_string(std::string_view s) noexcept;

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;  ///< x <= threshold goes left
  int left = -1, right = -1;
  double value = 0.0;  ///< leaf output (already scaled)
  double gain = 0.0;
  double cover = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const double* row, Eigen::Index stride) const;
};

/// Second-order boosting on the logistic loss with exact greedy splits.
class GradientBoostedTrees final : public TrainedModel {
 public:
  static GradientBoostedTrees fit(const Matrix& X, const Labels& y, const GbtParams& p = {});

  ModelKind kind() const noexcept override { return ModelKind::Gbt; }
  Vector margin(const Matrix& X) const;
  Vector predict_proba(const Matrix& X) const override;
  /// Gain importances.
  std::vector<double> importances() const override { return importances(ImportanceType::Gain); }
  std::vector<double> importances(ImportanceType type) const;
  nlohmann::json params_to_json() const override;
  static GradientBoostedTrees from_json(const nlohmann::json& j);

  double base_margin() const noexcept { return base_margin_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }

 private:
  double base_margin_ = 0.0;
  std::vector<Tree> trees_;
};

// ---------------------------------------------------------------------------
// Multilayer perceptron

struct MlpParams {
  std::vector<int> hidden = {100, 50};
  double learning_rate = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  int batch_size = 200;
  double alpha = 1e-4;
  int max_epochs = 500;
  bool early_stopping = true;
  double validation_fraction = 0.1;
  double tol = 1e-4;
  int patience = 10;
  bool balanced = true;
  std::uint64_t seed = 0;
};

struct MlpLayer {
  Matrix W;  ///< fan_in x fan_out
  Vector b;
};

/// ReLU hidden layers, sigmoid output, Adam on weighted cross-entropy.
class Mlp final : public TrainedModel {
 public:
  static Mlp fit(const Matrix& X, const Labels& y, const MlpParams& p = {});
  /// Freshly initialized network (no training).
  static Mlp initialize(int n_inputs, const MlpParams& p);

  ModelKind kind() const noexcept override { return ModelKind::Mlp; }
  Vector logits(const Matrix& X) const;
  Vector predict_proba(const Matrix& X) const override;
  nlohmann::json params_to_json() const override;
  static Mlp from_json(const nlohmann::json& j);

  /// Mean weighted cross-entropy plus alpha/(2m) * sum |W|^2, and its
  /// gradient with respect to every layer's W and b.
  double loss_and_gradient(const Matrix& X, const Vector& y, const Vector& w, std::vector<MlpLayer>* grad) const;

  std::vector<MlpLayer>& layers() noexcept { return layers_; }
  const std::vector<MlpLayer>& layers() const noexcept { return layers_; }
  int epochs_run() const noexcept { return epochs_; }
  double alpha() const noexcept { return alpha_; }

 private:
  std::vector<MlpLayer> layers_;
  double alpha_ = 1e-4;
  int epochs_ = 0;
};

// ---------------------------------------------------------------------------
// Random forest

struct ForestParams {
  int n_trees = 100;
  int max_features = 0;  ///< 0 = floor(sqrt(d))
  int min_samples_split = 2;
  int max_depth = 0;  ///< 0 = unlimited
  std::uint64_t seed = 0;
};

/// Bootstrap-aggregated Gini trees.
class RandomForest final : public TrainedModel {
 public:
  static RandomForest fit(const Matrix& X, const Labels& y, const ForestParams& p = {});

  ModelKind kind() const noexcept override { return ModelKind::RandomForest; }
  Vector predict_proba(const Matrix& X) const override;
  /// Mean decrease in impurity, normalized per tree, averaged, then to sum 1.
  std::vector<double> importances() const override { return importances_; }
  nlohmann::json params_to_json() const override;
  static RandomForest from_json(const nlohmann::json& j);

  const std::vector<Tree>& trees() const noexcept { return trees_; }

 private:
  std::vector<Tree> trees_;
  std::vector<double> importances_;
};

// ---------------------------------------------------------------------------
// Uniform entry points

/// kind + hyperparameters + seed. Unknown hyperparameter keys are a Config error.
struct ModelConfig {
  ModelKind kind = ModelKind::Gbt;
  nlohmann::json hyper = nlohmann::json::object();
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

LogRegParams logreg_params(const nlohmann::json& hyper);
GbtParams gbt_params(const nlohmann::json& hyper);
MlpParams mlp_params(const nlohmann::json& hyper, std::uint64_t seed);
ForestParams forest_params(const nlohmann::json& hyper, std::uint64_t seed);

std::unique_ptr<TrainedModel> train(const ModelConfig& config, const Matrix& X, const Labels& y,
                                    std::vector<std::string> feature_names = {});

/// Checks names when both sides carry them, then predicts.
Vector predict_proba(const TrainedModel& m, const Matrix& X, const std::vector<std::string>& columns = {});

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const TrainedModel& m);
std::unique_ptr<TrainedModel> model_from_json(const nlohmann::json& j);

}  // namespace virality::models
