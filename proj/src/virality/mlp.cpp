// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "virality/common.hpp"
#include "virality/models.hpp"

namespace virality::models {

using nlohmann::json;

namespace {

double softplus(double z) noexcept { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Matrix gather_rows(const Matrix& X, const std::vector<int>& idx, std::size_t from, std::size_t to) {
  Matrix out(static_cast<Eigen::Index>(to - from), X.cols());
  for (std::size_t r = from; r < to; ++r) out.row(static_cast<Eigen::Index>(r - from)) = X.row(idx[r]);
  return out;
}

Vector gather(const Vector& v, const std::vector<int>& idx, std::size_t from, std::size_t to) {
  Vector out(static_cast<Eigen::Index>(to - from));
  for (std::size_t r = from; r < to; ++r) out[static_cast<Eigen::Index>(r - from)] = v[idx[r]];
  return out;
}

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
    fail(ErrorKind::Parse, "matrix shape does not match its data");
  return Eigen::Map<const Matrix>(data.data(), rows, cols);
}

}  // namespace

Mlp Mlp::initialize(int n_inputs, const MlpParams& p) {
  if (n_inputs < 1) fail(ErrorKind::Fit, "network needs at least one input");
  Mlp m;
  m.n_features_ = static_cast<std::size_t>(n_inputs);
  m.alpha_ = p.alpha;
  std::mt19937_64 rng(p.seed);
  std::vector<int> sizes{n_inputs};
  sizes.insert(sizes.end(), p.hidden.begin(), p.hidden.end());
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-bound, bound);
    MlpLayer layer{Matrix(fan_in, fan_out), Vector::Zero(fan_out)};
    for (Eigen::Index c = 0; c < fan_out; ++c)
      for (Eigen::Index r = 0; r < fan_in; ++r) layer.W(r, c) = u(rng);
    m.layers_.push_back(std::move(layer));
  }
  return m;
}

Vector Mlp::logits(const Matrix& X) const {
  check_columns(X);
  Matrix a = X;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = a * layers_[l].W;
    z.rowwise() += layers_[l].b.transpose();
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a.col(0);
}

Vector Mlp::predict_proba(const Matrix& X) const {
  return logits(X).unaryExpr([](double z) { return sigmoid(z); });
}

double Mlp::loss_and_gradient(const Matrix& X, const Vector& y, const Vector& w, std::vector<MlpLayer>* grad) const {
  const Eigen::Index m = X.rows();
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<Matrix> acts{X};
  acts.reserve(layers_.size() + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = acts.back() * layers_[l].W;
    z.rowwise() += layers_[l].b.transpose();
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    acts.push_back(std::move(z));
  }
  const Vector z = acts.back().col(0);
  double loss = 0;
  for (Eigen::Index i = 0; i < m; ++i) loss += w[i] * (softplus(z[i]) - y[i] * z[i]);
  loss *= inv_m;
  double sq = 0;
  for (const auto& layer : layers_) sq += layer.W.squaredNorm();
  loss += 0.5 * alpha_ * inv_m * sq;
  if (!grad) return loss;

  grad->resize(layers_.size());
  Matrix delta(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) delta(i, 0) = w[i] * (sigmoid(z[i]) - y[i]) * inv_m;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    MlpLayer& g = (*grad)[l];
    g.W = acts[l].transpose() * delta + alpha_ * inv_m * layers_[l].W;
    g.b = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix back = delta * layers_[l].W.transpose();
    delta = (acts[l].array() > 0.0).select(back, 0.0);
  }
  return loss;
}

Mlp Mlp::fit(const Matrix& X, const Labels& y, const MlpParams& p) {
  check_training_data(X, y);
  Mlp model = initialize(static_cast<int>(X.cols()), p);
  std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ULL);

  const std::vector<double> sw = p.balanced ? balanced_sample_weights(y) : std::vector<double>(y.size(), 1.0);
  Vector yv(static_cast<Eigen::Index>(y.size())), wv(yv.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    yv[static_cast<Eigen::Index>(i)] = y[i];
    wv[static_cast<Eigen::Index>(i)] = sw[i];
  }

  std::vector<int> train_idx, val_idx;
  bool use_val = false;
  if (p.early_stopping) {
    std::vector<int> by_class[2];
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));
    std::vector<int> v, t;
    bool ok = true;
    for (auto& cls : by_class) {
      std::shuffle(cls.begin(), cls.end(), rng);
      const auto k = static_cast<std::size_t>(std::llround(p.validation_fraction * static_cast<double>(cls.size())));
      const std::size_t take = std::min(std::max<std::size_t>(k, 1), cls.size() - 1);
      if (cls.size() < 2) ok = false;
      v.insert(v.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(take));
      t.insert(t.end(), cls.begin() + static_cast<std::ptrdiff_t>(take), cls.end());
    }
    if (ok) {
      std::sort(v.begin(), v.end());
      std::sort(t.begin(), t.end());
      train_idx = std::move(t);
      val_idx = std::move(v);
      use_val = true;
    }
  }
  if (!use_val) {
    train_idx.resize(y.size());
    std::iota(train_idx.begin(), train_idx.end(), 0);
  }
  Matrix Xval;
  Vector yval, wval;
  if (use_val) {
    Xval = gather_rows(X, val_idx, 0, val_idx.size());
    yval = gather(yv, val_idx, 0, val_idx.size());
    wval = gather(wv, val_idx, 0, val_idx.size());
  }

  std::vector<MlpLayer> m1, m2, grad;
  for (const auto& l : model.layers_) {
    m1.push_back({Matrix::Zero(l.W.rows(), l.W.cols()), Vector::Zero(l.b.size())});
    m2.push_back(m1.back());
  }

  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(p.batch_size), train_idx.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<MlpLayer> best_layers = model.layers_;
  int stale = 0;
  long step = 0;
  int epoch = 0;
  for (; epoch < p.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0;
    for (std::size_t from = 0; from < train_idx.size(); from += batch) {
      const std::size_t to = std::min(train_idx.size(), from + batch);
      const Matrix Xb = gather_rows(X, train_idx, from, to);
      const Vector yb = gather(yv, train_idx, from, to), wb = gather(wv, train_idx, from, to);
      epoch_loss += model.loss_and_gradient(Xb, yb, wb, &grad) * static_cast<double>(to - from);
      ++step;
      const double lr = p.learning_rate * std::sqrt(1 - std::pow(p.beta2, static_cast<double>(step))) /
                        (1 - std::pow(p.beta1, static_cast<double>(step)));
      for (std::size_t l = 0; l < model.layers_.size(); ++l) {
        m1[l].W = p.beta1 * m1[l].W + (1 - p.beta1) * grad[l].W;
        m2[l].W = p.beta2 * m2[l].W + (1 - p.beta2) * grad[l].W.cwiseAbs2();
        m1[l].b = p.beta1 * m1[l].b + (1 - p.beta1) * grad[l].b;
        m2[l].b = p.beta2 * m2[l].b + (1 - p.beta2) * grad[l].b.cwiseAbs2();
        model.layers_[l].W.array() -= lr * m1[l].W.array() / (m2[l].W.array().sqrt() + p.epsilon);
        model.layers_[l].b.array() -= lr * m1[l].b.array() / (m2[l].b.array().sqrt() + p.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(train_idx.size());
    const double monitored = use_val ? model.loss_and_gradient(Xval, yval, wval, nullptr) : epoch_loss;
    if (!std::isfinite(monitored)) break;
    if (monitored > best - p.tol)
      ++stale;
    else
      stale = 0;
    if (monitored < best) {
      best = monitored;
      best_layers = model.layers_;
    }
    if (stale >= p.patience) {
      ++epoch;
      break;
    }
  }
  if (use_val) model.layers_ = std::move(best_layers);
  model.epochs_ = epoch;
  return model;
}

json Mlp::params_to_json() const {
  json layers = json::array();
  for (const auto& l : layers_)
    layers.push_back({{"W", matrix_to_json(l.W)}, {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}});
  return {{"n_features", n_features_}, {"alpha", alpha_}, {"epochs", epochs_}, {"layers", std::move(layers)}};
}

Mlp Mlp::from_json(const json& j) {
  Mlp m;
  m.n_features_ = j.at("n_features").get<std::size_t>();
  m.alpha_ = j.at("alpha").get<double>();
  m.epochs_ = j.value("epochs", 0);
  Eigen::Index prev = static_cast<Eigen::Index>(m.n_features_);
  for (const auto& lj : j.at("layers")) {
    MlpLayer l;
    l.W = matrix_from_json(lj.at("W"));
    const auto b = lj.at("b").get<std::vector<double>>();
    l.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    if (l.W.rows() != prev || l.W.cols() != l.b.size()) fail(ErrorKind::Parse, "layer shapes do not chain");
    prev = l.W.cols();
    m.layers_.push_back(std::move(l));
  }
  if (m.layers_.empty() || prev != 1) fail(ErrorKind::Parse, "network must end in a single output");
  return m;
}

}  // namespace virality::models
