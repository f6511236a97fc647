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

double gini(double w, double wpos) {
  if (w <= 0) return 0.0;
  const double p = wpos / w;
  return 1.0 - p * p - (1 - p) * (1 - p);
}

struct BuildTask {
  int node;
  std::vector<int> samples;
  int depth;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<int>& y, const ForestParams& p, int mtry, std::mt19937_64& rng)
      : X_(X), y_(y), p_(p), mtry_(mtry), rng_(rng), importance_(static_cast<std::size_t>(X.cols()), 0.0) {}

  Tree build(const std::vector<int>& counts) {
    Tree t;
    std::vector<int> root;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0) root.push_back(static_cast<int>(i));
    t.nodes.emplace_back();
    std::vector<BuildTask> stack;
    stack.push_back({0, std::move(root), 0});
    std::vector<int> features(static_cast<std::size_t>(X_.cols()));
    while (!stack.empty()) {
      BuildTask task = std::move(stack.back());
      stack.pop_back();
      double w = 0, wpos = 0;
      for (int i : task.samples) {
        w += counts[static_cast<std::size_t>(i)];
        wpos += counts[static_cast<std::size_t>(i)] * y_[static_cast<std::size_t>(i)];
      }
      TreeNode& nd = t.nodes[static_cast<std::size_t>(task.node)];
      nd.value = wpos / w;
      nd.cover = w;
      const double imp = gini(w, wpos);
      if (imp <= 0 || w < p_.min_samples_split || (p_.max_depth > 0 && task.depth >= p_.max_depth)) continue;

      std::iota(features.begin(), features.end(), 0);
      int best_feature = -1;
      double best_score = std::numeric_limits<double>::infinity();
      double best_thr = 0;
      std::vector<int> order = task.samples;
      for (std::size_t k = 0; k < features.size(); ++k) {
        if (static_cast<int>(k) >= mtry_ && best_feature >= 0) break;
        std::uniform_int_distribution<std::size_t> pick(k, features.size() - 1);
        std::swap(features[k], features[pick(rng_)]);
        const int j = features[k];
        std::sort(order.begin(), order.end(), [&](int a, int b) {
          const double xa = X_(a, j), xb = X_(b, j);
          return xa < xb || (xa == xb && a < b);
        });
        double wl = 0, wposl = 0;
        for (std::size_t r = 0; r + 1 < order.size(); ++r) {
          const int i = order[r];
          wl += counts[static_cast<std::size_t>(i)];
          wposl += counts[static_cast<std::size_t>(i)] * y_[static_cast<std::size_t>(i)];
          const double x = X_(i, j), xn = X_(order[r + 1], j);
          if (!(xn > x)) continue;
          const double score = wl * gini(wl, wposl) + (w - wl) * gini(w - wl, wpos - wposl);
          if (score < best_score) {
            best_score = score;
            best_feature = j;
            best_thr = x;
          }
        }
      }
      if (best_feature < 0) continue;
      importance_[static_cast<std::size_t>(best_feature)] += w * imp - best_score;

      std::vector<int> left, right;
      for (int i : task.samples) (X_(i, best_feature) <= best_thr ? left : right).push_back(i);
      const int l = static_cast<int>(t.nodes.size());
      t.nodes.emplace_back();
      t.nodes.emplace_back();
      TreeNode& parent = t.nodes[static_cast<std::size_t>(task.node)];
      parent.feature = best_feature;
      parent.threshold = best_thr;
      parent.left = l;
      parent.right = l + 1;
      parent.gain = w * imp - best_score;
      stack.push_back({l + 1, std::move(right), task.depth + 1});
      stack.push_back({l, std::move(left), task.depth + 1});
    }
    return t;
  }

  std::vector<double> take_importance() {
    std::vector<double> out(importance_.size(), 0.0);
    std::swap(out, importance_);
    return out;
  }

 private:
  const Matrix& X_;
  const std::vector<int>& y_;
  const ForestParams& p_;
  int mtry_;
  std::mt19937_64& rng_;
  std::vector<double> importance_;
};

}  // namespace

RandomForest RandomForest::fit(const Matrix& X0, const Labels& y0, const ForestParams& p) {
  check_training_data(X0, y0);
  const Eigen::Index n = X0.rows(), d = X0.cols();
  if (d == 0) fail(ErrorKind::Fit, "random forest needs at least one feature");

  // Canonical row order so the fitted forest does not depend on input order.
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (X0(a, j) < X0(b, j)) return true;
      if (X0(b, j) < X0(a, j)) return false;
    }
    return y0[static_cast<std::size_t>(a)] < y0[static_cast<std::size_t>(b)];
  });
  Matrix X(n, d);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    X.row(r) = X0.row(perm[static_cast<std::size_t>(r)]);
    y[static_cast<std::size_t>(r)] = y0[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
  }

  const int mtry = p.max_features > 0 ? std::min<int>(p.max_features, static_cast<int>(d))
                                      : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  RandomForest model;
  model.n_features_ = static_cast<std::size_t>(d);
  std::mt19937_64 rng(p.seed);
  TreeBuilder builder(X, y, p, mtry, rng);
  std::vector<double> imp_sum(static_cast<std::size_t>(d), 0.0);
  int contributing = 0;
  std::uniform_int_distribution<Eigen::Index> draw(0, n - 1);
  for (int t = 0; t < p.n_trees; ++t) {
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k = 0; k < n; ++k) ++counts[static_cast<std::size_t>(draw(rng))];
    model.trees_.push_back(builder.build(counts));
    auto imp = builder.take_importance();
    const double s = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (model.trees_.back().nodes.size() > 1 && s > 0) {
      for (std::size_t j = 0; j < imp.size(); ++j) imp_sum[j] += imp[j] / s;
      ++contributing;
    }
  }
  model.importances_.assign(static_cast<std::size_t>(d), 0.0);
  const double total = std::accumulate(imp_sum.begin(), imp_sum.end(), 0.0);
  if (contributing > 0 && total > 0)
    for (std::size_t j = 0; j < imp_sum.size(); ++j) model.importances_[j] = imp_sum[j] / total;
  return model;
}

Vector RandomForest::predict_proba(const Matrix& X) const {
  check_columns(X);
  Vector out = Vector::Zero(X.rows());
  for (const Tree& t : trees_)
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] += t.predict(X.data() + i, X.rows());
  return out / static_cast<double>(trees_.size());
}

json RandomForest::params_to_json() const {
  json trees = json::array();
  for (const Tree& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  return {{"n_features", n_features_}, {"importances", importances_}, {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const json& j) {
  RandomForest m;
  m.n_features_ = j.at("n_features").get<std::size_t>();
  m.importances_ = j.at("importances").get<std::vector<double>>();
  if (m.importances_.size() != m.n_features_) fail(ErrorKind::Parse, "importance width mismatch");
  for (const auto& tj : j.at("trees")) {
    Tree t;
    for (const auto& a : tj) {
      TreeNode n;
      n.feature = a.at(0).get<int>();
      n.threshold = a.at(1).get<double>();
      n.left = a.at(2).get<int>();
      n.right = a.at(3).get<int>();
      n.value = a.at(4).get<double>();
      t.nodes.push_back(n);
    }
    const int size = static_cast<int>(t.nodes.size());
    for (const auto& n : t.nodes)
      if (n.feature >= 0 && (n.feature >= static_cast<int>(m.n_features_) || n.left <= 0 || n.right <= 0 ||
                             n.left >= size || n.right >= size))
        fail(ErrorKind::Parse, "corrupt tree node");
    if (size == 0) fail(ErrorKind::Parse, "empty tree");
    m.trees_.push_back(std::move(t));
  }
  if (m.trees_.empty()) fail(ErrorKind::Parse, "forest has no trees");
  return m;
}

}  // namespace virality::models
