// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/models.hpp"

#include <cmath>
#include <set>

#include "virality/common.hpp"

namespace virality::models {

using nlohmann::json;

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::LogReg: return "logreg";
    case ModelKind::Gbt: return "gbt";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::RandomForest: return "random_forest";
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_string(std::string_view s) noexcept {
  for (ModelKind k : {ModelKind::LogReg, ModelKind::Gbt, ModelKind::Mlp, ModelKind::RandomForest})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_training_data(const Matrix& X, const Labels& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) fail(ErrorKind::Fit, "feature rows and labels differ in length");
  if (y.empty()) fail(ErrorKind::Fit, "no training rows");
  std::size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) fail(ErrorKind::Fit, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(v);
  }
  if (pos == 0 || pos == y.size()) fail(ErrorKind::Fit, "training labels contain a single class");
  if (!X.allFinite()) fail(ErrorKind::Domain, "training features contain non-finite values");
}

std::vector<double> balanced_sample_weights(const Labels& y) {
  double n1 = 0;
  for (int v : y) n1 += v;
  const double n = static_cast<double>(y.size());
  const double n0 = n - n1;
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] ? n / (2 * n1) : n / (2 * n0);
  return w;
}

void TrainedModel::set_feature_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != n_features_)
    fail(ErrorKind::Schema, "feature name count does not match model width");
  feature_names_ = std::move(names);
}

void TrainedModel::check_columns(const Matrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_features_)
    fail(ErrorKind::Schema, "expected " + std::to_string(n_features_) + " feature columns, got " +
                                std::to_string(X.cols()));
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double softplus(double z) noexcept { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

LogisticRegression::LogisticRegression(Vector coef, double intercept) : coef_(std::move(coef)), intercept_(intercept) {
  n_features_ = static_cast<std::size_t>(coef_.size());
}

LogisticRegression LogisticRegression::fit(const Matrix& X, const Labels& y, const LogRegParams& p) {
  check_training_data(X, y);
  const std::vector<double> w = p.balanced ? balanced_sample_weights(y) : std::vector<double>(y.size(), 1.0);
  return fit_weighted(X, y, w, p);
}

LogisticRegression LogisticRegression::fit_weighted(const Matrix& X, const Labels& y,
                                                    const std::vector<double>& sample_weight, const LogRegParams& p) {
  check_training_data(X, y);
  if (!(p.C > 0)) fail(ErrorKind::Config, "C must be positive");
  if (sample_weight.size() != y.size()) fail(ErrorKind::Fit, "sample weights misaligned");
  const Eigen::Index n = X.rows(), d = X.cols();
  Matrix Xa(n, d + 1);
  Xa.leftCols(d) = X;
  Xa.col(d).setOnes();
  Vector yv(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    yv[i] = y[static_cast<std::size_t>(i)];
    s[i] = sample_weight[static_cast<std::size_t>(i)] * p.C;
  }

  auto objective = [&](const Vector& theta) {
    const Vector z = Xa * theta;
    double f = 0.5 * theta.head(d).squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) f += s[i] * (softplus(z[i]) - yv[i] * z[i]);
    return f;
  };

  Vector theta = Vector::Zero(d + 1);
  double f = objective(theta);
  LogisticRegression model;
  int it = 0;
  double gnorm = 0;
  for (; it < p.max_iter; ++it) {
    const Vector z = Xa * theta;
    Vector r(n), h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pi = sigmoid(z[i]);
      r[i] = s[i] * (pi - yv[i]);
      h[i] = s[i] * pi * (1 - pi);
    }
    Vector g = Xa.transpose() * r;
    g.head(d) += theta.head(d);
    gnorm = g.norm();
    if (gnorm < p.tol) break;

    Matrix H = Xa.transpose() * (Xa.array().colwise() * h.array()).matrix();
    H.diagonal().head(d).array() += 1.0;
    H(d, d) += 1e-12;
    Eigen::LDLT<Matrix> ldlt(H);
    Vector step = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(g) >= 0) step = -g;

    double t = 1.0;
    const double slope = g.dot(step);
    Vector next;
    double fn = f;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      next = theta + t * step;
      fn = objective(next);
      if (fn <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no further descent possible in floating point
    theta = next;
    const bool stalled = f - fn <= 1e-15 * std::max(1.0, std::abs(f));
    f = fn;
    if (stalled) {
      ++it;
      break;
    }
  }
  model.coef_ = theta.head(d);
  model.intercept_ = theta[d];
  model.n_features_ = static_cast<std::size_t>(d);
  model.iterations_ = it;
  model.grad_norm_ = gnorm;
  return model;
}

Vector LogisticRegression::decision_function(const Matrix& X) const {
  check_columns(X);
  return (X * coef_).array() + intercept_;
}

Vector LogisticRegression::predict_proba(const Matrix& X) const {
  return decision_function(X).unaryExpr([](double z) { return sigmoid(z); });
}

std::vector<double> LogisticRegression::importances() const {
  std::vector<double> out(static_cast<std::size_t>(coef_.size()));
  for (Eigen::Index j = 0; j < coef_.size(); ++j) out[static_cast<std::size_t>(j)] = std::abs(coef_[j]);
  return out;
}

json LogisticRegression::params_to_json() const {
  return {{"coef", std::vector<double>(coef_.data(), coef_.data() + coef_.size())},
          {"intercept", intercept_},
          {"iterations", iterations_}};
}

LogisticRegression LogisticRegression::from_json(const json& j) {
  const auto c = j.at("coef").get<std::vector<double>>();
  LogisticRegression m(Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size())),
                       j.at("intercept").get<double>());
  m.iterations_ = j.value("iterations", 0);
  return m;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

class HyperReader {
 public:
  HyperReader(const json& h, std::string_view kind) : h_(h), kind_(kind) {
    if (!h_.is_object()) fail(ErrorKind::Config, "hyperparameters must be an object");
  }

  template <class T>
  void take(const char* key, T& out) {
    seen_.insert(key);
    auto it = h_.find(key);
    if (it == h_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::Config, std::string("bad value for ") + std::string(kind_) + "." + key);
    }
  }

  template <class T>
  void take(const char* key, std::optional<T>& out) {
    T v{};
    seen_.insert(key);
    auto it = h_.find(key);
    if (it == h_.end() || it->is_null()) return;
    take(key, v);
    out = v;
  }

  void finish() const {
    for (const auto& [k, v] : h_.items())
      if (!seen_.contains(k)) fail(ErrorKind::Config, "unknown " + std::string(kind_) + " hyperparameter '" + k + "'");
  }

 private:
  const json& h_;
  std::string_view kind_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

LogRegParams logreg_params(const json& hyper) {
  LogRegParams p;
  HyperReader r(hyper, "logreg");
  r.take("C", p.C);
  r.take("balanced", p.balanced);
  r.take("tol", p.tol);
  r.take("max_iter", p.max_iter);
  r.finish();
  if (!(p.C > 0) || !(p.tol > 0) || p.max_iter < 1) fail(ErrorKind::Config, "invalid logreg hyperparameters");
  return p;
}

GbtParams gbt_params(const json& hyper) {
  GbtParams p;
  HyperReader r(hyper, "gbt");
  r.take("n_rounds", p.n_rounds);
  r.take("max_depth", p.max_depth);
  r.take("eta", p.eta);
  r.take("min_child_weight", p.min_child_weight);
  r.take("lambda", p.lambda);
  r.take("gamma", p.gamma);
  r.take("scale_pos_weight", p.scale_pos_weight);
  r.finish();
  if (p.n_rounds < 0 || p.max_depth < 0 || !(p.eta > 0) || p.min_child_weight < 0 || p.lambda < 0 || p.gamma < 0 ||
      (p.scale_pos_weight && !(*p.scale_pos_weight > 0)))
    fail(ErrorKind::Config, "invalid gbt hyperparameters");
  return p;
}

MlpParams mlp_params(const json& hyper, std::uint64_t seed) {
  MlpParams p;
  p.seed = seed;
  HyperReader r(hyper, "mlp");
  r.take("hidden", p.hidden);
  r.take("learning_rate", p.learning_rate);
  r.take("batch_size", p.batch_size);
  r.take("alpha", p.alpha);
  r.take("max_epochs", p.max_epochs);
  r.take("early_stopping", p.early_stopping);
  r.take("validation_fraction", p.validation_fraction);
  r.take("tol", p.tol);
  r.take("patience", p.patience);
  r.take("balanced", p.balanced);
  r.finish();
  for (int h : p.hidden)
    if (h < 1) fail(ErrorKind::Config, "hidden layer sizes must be positive");
  if (!(p.learning_rate > 0) || p.batch_size < 1 || p.alpha < 0 || p.max_epochs < 1 ||
      !(p.validation_fraction > 0 && p.validation_fraction < 1) || p.patience < 1)
    fail(ErrorKind::Config, "invalid mlp hyperparameters");
  return p;
}

ForestParams forest_params(const json& hyper, std::uint64_t seed) {
  ForestParams p;
  p.seed = seed;
  HyperReader r(hyper, "random_forest");
  r.take("n_trees", p.n_trees);
  r.take("max_features", p.max_features);
  r.take("min_samples_split", p.min_samples_split);
  r.take("max_depth", p.max_depth);
  r.finish();
  if (p.n_trees < 1 || p.max_features < 0 || p.min_samples_split < 2 || p.max_depth < 0)
    fail(ErrorKind::Config, "invalid random_forest hyperparameters");
  return p;
}

json to_json(const ModelConfig& c) {
  return {{"kind", std::string(to_string(c.kind))}, {"hyper", c.hyper}, {"seed", c.seed}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  try {
    const auto k = model_kind_from_string(j.at("kind").get<std::string>());
    if (!k) fail(ErrorKind::Config, "unknown model kind '" + j.at("kind").get<std::string>() + "'");
    c.kind = *k;
    if (j.contains("hyper")) c.hyper = j.at("hyper");
    c.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed model config: ") + e.what());
  }
  return c;
}

std::unique_ptr<TrainedModel> train(const ModelConfig& config, const Matrix& X, const Labels& y,
                                    std::vector<std::string> feature_names) {
  std::unique_ptr<TrainedModel> m;
  switch (config.kind) {
    case ModelKind::LogReg:
      m = std::make_unique<LogisticRegression>(LogisticRegression::fit(X, y, logreg_params(config.hyper)));
      break;
    case ModelKind::Gbt:
      m = std::make_unique<GradientBoostedTrees>(GradientBoostedTrees::fit(X, y, gbt_params(config.hyper)));
      break;
    case ModelKind::Mlp:
      m = std::make_unique<Mlp>(Mlp::fit(X, y, mlp_params(config.hyper, config.seed)));
      break;
    case ModelKind::RandomForest:
      m = std::make_unique<RandomForest>(RandomForest::fit(X, y, forest_params(config.hyper, config.seed)));
      break;
  }
  m->set_feature_names(std::move(feature_names));
  m->set_provenance(config.hyper, config.seed);
  return m;
}

Vector predict_proba(const TrainedModel& m, const Matrix& X, const std::vector<std::string>& columns) {
  if (!columns.empty() && !m.feature_names().empty() && columns != m.feature_names())
    fail(ErrorKind::Schema, "feature columns differ from the columns the model was trained on");
  return m.predict_proba(X);
}

json to_json(const TrainedModel& m) {
  return {{"format_version", kModelFormatVersion},
          {"kind", std::string(to_string(m.kind()))},
          {"n_features", m.n_features()},
          {"feature_names", m.feature_names()},
          {"config", m.config()},
          {"seed", m.seed()},
          {"params", m.params_to_json()}};
}

std::unique_ptr<TrainedModel> model_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) fail(ErrorKind::Parse, "unsupported model version");
    const auto kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::Parse, "unknown model kind");
    const json& p = j.at("params");
    std::unique_ptr<TrainedModel> m;
    switch (*kind) {
      case ModelKind::LogReg: m = std::make_unique<LogisticRegression>(LogisticRegression::from_json(p)); break;
      case ModelKind::Gbt: m = std::make_unique<GradientBoostedTrees>(GradientBoostedTrees::from_json(p)); break;
      case ModelKind::Mlp: m = std::make_unique<Mlp>(Mlp::from_json(p)); break;
      case ModelKind::RandomForest: m = std::make_unique<RandomForest>(RandomForest::from_json(p)); break;
    }
    if (m->n_features() != j.at("n_features").get<std::size_t>()) fail(ErrorKind::Parse, "model width mismatch");
    m->set_feature_names(j.at("feature_names").get<std::vector<std::string>>());
    m->set_provenance(j.at("config"), j.at("seed").get<std::uint64_t>());
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace virality::models
