// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "virality/common.hpp"
#include "virality/models.hpp"

namespace virality::models {

using nlohmann::json;

std::string_view to_string(ImportanceType t) noexcept {
  switch (t) {
    case ImportanceType::Gain: return "gain";
    case ImportanceType::Cover: return "cover";
    case ImportanceType::Frequency: return "frequency";
  }
  return "unknown";
}

std::optional<ImportanceType> importance_type_from_string(std::string_view s) noexcept {
  for (auto t : {ImportanceType::Gain, ImportanceType::Cover, ImportanceType::Frequency})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

double Tree::predict(const double* row, Eigen::Index stride) const {
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(k)];
    k = row[n.feature * stride] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(k)].value;
}

namespace {

struct SortedColumn {
  std::vector<int> idx;
  std::vector<double> x;
};

struct Candidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0;
};

struct Accum {
  double gl = 0, hl = 0, last = 0;
  bool has = false;
};

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.gain, n.cover});
  return nodes;
}

Tree tree_from_json(const json& j, std::size_t n_features) {
  Tree t;
  for (const auto& a : j) {
    TreeNode n;
    n.feature = a.at(0).get<int>();
    n.threshold = a.at(1).get<double>();
    n.left = a.at(2).get<int>();
    n.right = a.at(3).get<int>();
    n.value = a.at(4).get<double>();
    n.gain = a.at(5).get<double>();
    n.cover = a.at(6).get<double>();
    t.nodes.push_back(n);
  }
  const int size = static_cast<int>(t.nodes.size());
  if (size == 0) fail(ErrorKind::Parse, "empty tree");
  for (const auto& n : t.nodes)
    if (n.feature >= 0 && (n.feature >= static_cast<int>(n_features) || n.left <= 0 || n.right <= 0 || n.left >= size ||
                           n.right >= size))
      fail(ErrorKind::Parse, "corrupt tree node");
  return t;
}

}  // namespace

GradientBoostedTrees GradientBoostedTrees::fit(const Matrix& X, const Labels& y, const GbtParams& p) {
  check_training_data(X, y);
  const Eigen::Index n = X.rows(), d = X.cols();
  double n_pos = 0;
  for (int v : y) n_pos += v;
  const double spw = p.scale_pos_weight.value_or((static_cast<double>(n) - n_pos) / n_pos);

  std::vector<double> sw(static_cast<std::size_t>(n));
  double wsum = 0, wpos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sw[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] ? spw : 1.0;
    wsum += sw[static_cast<std::size_t>(i)];
    wpos += y[static_cast<std::size_t>(i)] ? spw : 0.0;
  }

  GradientBoostedTrees model;
  model.n_features_ = static_cast<std::size_t>(d);
  model.base_margin_ = std::log(wpos / (wsum - wpos));

  std::vector<SortedColumn> cols(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    auto& c = cols[static_cast<std::size_t>(j)];
    c.idx.resize(static_cast<std::size_t>(n));
    std::iota(c.idx.begin(), c.idx.end(), 0);
    std::stable_sort(c.idx.begin(), c.idx.end(), [&](int a, int b) { return X(a, j) < X(b, j); });
    c.x.resize(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < c.idx.size(); ++r) c.x[r] = X(c.idx[r], j);
  }

  std::vector<double> F(static_cast<std::size_t>(n), model.base_margin_), g(F.size()), h(F.size());
  std::vector<int> pos(F.size());

  for (int round = 0; round < p.n_rounds; ++round) {
    for (std::size_t i = 0; i < F.size(); ++i) {
      const double pr = sigmoid(F[i]);
      g[i] = sw[i] * (pr - y[i]);
      h[i] = sw[i] * pr * (1 - pr);
    }
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<double> G{std::accumulate(g.begin(), g.end(), 0.0)}, H{std::accumulate(h.begin(), h.end(), 0.0)};
    std::fill(pos.begin(), pos.end(), 0);
    std::vector<int> frontier{0};

    for (int depth = 0; depth < p.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> slot(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) slot[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
      std::vector<Candidate> best(frontier.size());
      std::vector<Accum> acc(frontier.size());

      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& c = cols[static_cast<std::size_t>(j)];
        std::fill(acc.begin(), acc.end(), Accum{});
        for (std::size_t r = 0; r < c.idx.size(); ++r) {
          const int i = c.idx[r];
          const int s = slot[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
          if (s < 0) continue;
          Accum& a = acc[static_cast<std::size_t>(s)];
          const double x = c.x[r];
          if (a.has && x > a.last) {
            const int node = frontier[static_cast<std::size_t>(s)];
            const double Gt = G[static_cast<std::size_t>(node)], Ht = H[static_cast<std::size_t>(node)];
            const double gr = Gt - a.gl, hr = Ht - a.hl;
            if (a.hl >= p.min_child_weight && hr >= p.min_child_weight) {
              const double gain =
                  a.gl * a.gl / (a.hl + p.lambda) + gr * gr / (hr + p.lambda) - Gt * Gt / (Ht + p.lambda);
              Candidate& b = best[static_cast<std::size_t>(s)];
              if (gain > b.gain) b = {gain, static_cast<int>(j), a.last};
            }
          }
          a.gl += g[static_cast<std::size_t>(i)];
          a.hl += h[static_cast<std::size_t>(i)];
          a.last = x;
          a.has = true;
        }
      }

      std::vector<int> next;
      std::vector<int> split_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        const Candidate& b = best[s];
        if (b.feature < 0 || !(b.gain >= p.gamma)) continue;
        const int node = frontier[s];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        G.push_back(0);
        G.push_back(0);
        H.push_back(0);
        H.push_back(0);
        TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
        nd.feature = b.feature;
        nd.threshold = b.threshold;
        nd.left = left;
        nd.right = left + 1;
        nd.gain = b.gain;
        split_of[static_cast<std::size_t>(node)] = node;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const int k = pos[i];
        if (static_cast<std::size_t>(k) >= split_of.size() || split_of[static_cast<std::size_t>(k)] < 0) continue;
        const TreeNode& nd = tree.nodes[static_cast<std::size_t>(k)];
        const int child = X(static_cast<Eigen::Index>(i), nd.feature) <= nd.threshold ? nd.left : nd.right;
        pos[i] = child;
        G[static_cast<std::size_t>(child)] += g[i];
        H[static_cast<std::size_t>(child)] += h[i];
      }
      frontier = std::move(next);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      TreeNode& nd = tree.nodes[k];
      nd.cover = H[k];
      if (nd.feature < 0) nd.value = -G[k] / (H[k] + p.lambda) * p.eta;
    }
    for (std::size_t i = 0; i < F.size(); ++i) F[i] += tree.nodes[static_cast<std::size_t>(pos[i])].value;
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

Vector GradientBoostedTrees::margin(const Matrix& X) const {
  check_columns(X);
  Vector out = Vector::Constant(X.rows(), base_margin_);
  for (const Tree& t : trees_)
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] += t.predict(X.data() + i, X.rows());
  return out;
}

Vector GradientBoostedTrees::predict_proba(const Matrix& X) const {
  return margin(X).unaryExpr([](double z) { return sigmoid(z); });
}

std::vector<double> GradientBoostedTrees::importances(ImportanceType type) const {
  std::vector<double> out(n_features_, 0.0);
  for (const Tree& t : trees_)
    for (const TreeNode& nd : t.nodes) {
      if (nd.feature < 0) continue;
      double v = 1.0;
      if (type == ImportanceType::Gain) v = std::max(0.0, nd.gain);
      if (type == ImportanceType::Cover) v = nd.cover;
      out[static_cast<std::size_t>(nd.feature)] += v;
    }
  return out;
}

json GradientBoostedTrees::params_to_json() const {
  json trees = json::array();
  for (const Tree& t : trees_) trees.push_back(tree_to_json(t));
  return {{"n_features", n_features_}, {"base_margin", base_margin_}, {"trees", std::move(trees)}};
}

GradientBoostedTrees GradientBoostedTrees::from_json(const json& j) {
  GradientBoostedTrees m;
  m.base_margin_ = j.at("base_margin").get<double>();
  m.n_features_ = j.at("n_features").get<std::size_t>();
  for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t, m.n_features_));
  return m;
}

}  // namespace virality::models
