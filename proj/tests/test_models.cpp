// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <random>

#include "virality/common.hpp"
#include "virality/models.hpp"

using namespace virality;
using namespace virality::models;

namespace {

struct Data {
  Matrix X;
  Labels y;
};

Data linear_data(int n, std::uint64_t seed, double pos_rate = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  Data d{Matrix(n, 3), Labels(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    const int yi = u(rng) < pos_rate;
    d.y[static_cast<std::size_t>(i)] = yi;
    d.X(i, 0) = z(rng) + (yi ? 1.5 : 0.0);
    d.X(i, 1) = z(rng) - (yi ? 0.5 : 0.0);
    d.X(i, 2) = z(rng);
  }
  return d;
}

Data xor_data() {
  Data d{Matrix(4, 2), {0, 1, 1, 0}};
  d.X << 0, 0, 0, 1, 1, 0, 1, 1;
  return d;
}

}  // namespace

TEST_CASE("balanced weights") {
  const auto w = balanced_sample_weights({1, 0, 0, 0});
  CHECK(w[0] == doctest::Approx(2.0));
  CHECK(w[1] == doctest::Approx(4.0 / 6.0));
  CHECK_THROWS_AS(check_training_data(Matrix(2, 1), {0, 0}), Error);
  CHECK_THROWS_AS(check_training_data(Matrix(2, 1), {0}), Error);
}

TEST_CASE("logreg: duplicated rows with half the C give the same fit") {
  const auto d = linear_data(300, 1);
  Matrix X2(600, 3);
  X2 << d.X, d.X;
  Labels y2 = d.y;
  y2.insert(y2.end(), d.y.begin(), d.y.end());
  LogRegParams p;
  p.C = 0.8;
  const auto a = LogisticRegression::fit(d.X, d.y, p);
  p.C = 0.4;
  const auto b = LogisticRegression::fit(X2, y2, p);
  for (int j = 0; j < 3; ++j) CHECK(a.coef()[j] == doctest::Approx(b.coef()[j]).epsilon(1e-6));
  CHECK(a.intercept() == doctest::Approx(b.intercept()).epsilon(1e-6));
  CHECK(a.final_gradient_norm() < 1e-6);
}

TEST_CASE("logreg: balanced weighting lifts minority recall") {
  const auto d = linear_data(2000, 2, 0.05);
  LogRegParams p;
  const auto m = LogisticRegression::fit(d.X, d.y, p);
  const auto proba = m.predict_proba(d.X);
  int tp = 0, pos = 0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    pos += d.y[i];
    tp += d.y[i] && proba[static_cast<Eigen::Index>(i)] >= 0.5;
  }
  CHECK(static_cast<double>(tp) / pos >= 0.5);
  CHECK(m.coef()[0] > 0);
  CHECK(m.coef()[1] < 0);
}

TEST_CASE("gbt: one stump by hand") {
  Matrix X(4, 1);
  X << 0, 1, 2, 3;
  const Labels y = {0, 0, 1, 1};
  GbtParams p;
  p.n_rounds = 1;
  p.max_depth = 1;
  p.eta = 0.3;
  p.lambda = 1.0;
  p.min_child_weight = 0;
  const auto m = GradientBoostedTrees::fit(X, y, p);
  CHECK(m.base_margin() == doctest::Approx(0.0));
  REQUIRE(m.trees().size() == 1);
  const auto& root = m.trees()[0].nodes[0];
  CHECK(root.feature == 0);
  // G = 1 and -1 on each side, H = 0.5
  CHECK(root.gain == doctest::Approx(2.0 / 1.5));
  const auto z = m.margin(X);
  CHECK(z[0] == doctest::Approx(-0.2));
  CHECK(z[1] == doctest::Approx(-0.2));
  CHECK(z[2] == doctest::Approx(0.2));
  CHECK(z[3] == doctest::Approx(0.2));
}

TEST_CASE("gbt: gamma blocks a split whose gain is below it") {
  Matrix X(4, 1);
  X << 0, 1, 2, 3;
  const Labels y = {0, 0, 1, 1};
  GbtParams p;
  p.n_rounds = 1;
  p.max_depth = 1;
  p.min_child_weight = 0;
  p.gamma = 1.4;
  CHECK(GradientBoostedTrees::fit(X, y, p).trees()[0].nodes.size() == 1);
  p.gamma = 2.0 / 1.5;  // equality still splits
  CHECK(GradientBoostedTrees::fit(X, y, p).trees()[0].nodes.size() == 3);
}

TEST_CASE("gbt: xor needs depth two") {
  const auto d = xor_data();
  GbtParams p;
  p.max_depth = 2;
  p.n_rounds = 20;
  p.min_child_weight = 0;
  const auto proba = GradientBoostedTrees::fit(d.X, d.y, p).predict_proba(d.X);
  for (int i = 0; i < 4; ++i) CHECK((proba[i] >= 0.5) == (d.y[static_cast<std::size_t>(i)] == 1));
}

TEST_CASE("gbt: importance types") {
  const auto d = linear_data(500, 3);
  GbtParams p;
  p.n_rounds = 20;
  p.max_depth = 3;
  const auto m = GradientBoostedTrees::fit(d.X, d.y, p);
  const auto gain = m.importances(ImportanceType::Gain);
  const auto freq = m.importances(ImportanceType::Frequency);
  const auto cover = m.importances(ImportanceType::Cover);
  REQUIRE(gain.size() == 3);
  CHECK(gain[0] > gain[2]);
  double splits = 0;
  for (const auto& t : m.trees())
    for (const auto& nd : t.nodes) splits += nd.feature >= 0;
  CHECK(freq[0] + freq[1] + freq[2] == doctest::Approx(splits));
  for (double c : cover) CHECK(c >= 0);
  CHECK(importance_type_from_string("cover") == ImportanceType::Cover);
  CHECK_FALSE(importance_type_from_string("weight").has_value());
}

TEST_CASE("random forest separates and its importances sum to one") {
  const auto d = linear_data(600, 4);
  ForestParams p;
  p.n_trees = 50;
  p.seed = 9;
  const auto m = RandomForest::fit(d.X, d.y, p);
  const auto imp = m.importances();
  CHECK(imp[0] + imp[1] + imp[2] == doctest::Approx(1.0));
  CHECK(imp[0] > imp[2]);
  const auto proba = m.predict_proba(d.X);
  for (Eigen::Index i = 0; i < proba.size(); ++i) {
    CHECK(proba[i] >= 0);
    CHECK(proba[i] <= 1);
  }
  CHECK(RandomForest::fit(d.X, d.y, p).predict_proba(d.X) == proba);
}

TEST_CASE("mlp gradient matches finite differences") {
  const auto d = linear_data(40, 5);
  MlpParams p;
  p.hidden = {5, 3};
  p.alpha = 1e-2;
  p.seed = 1;
  auto m = Mlp::initialize(3, p);
  // zero biases put dead rows exactly on the relu kink; move off it
  std::mt19937_64 brng(8);
  std::uniform_real_distribution<double> bu(-0.1, 0.1);
  for (auto& layer : m.layers())
    for (Eigen::Index k = 0; k < layer.b.size(); ++k) layer.b[k] = bu(brng);
  Vector y(40), w(40);
  for (int i = 0; i < 40; ++i) {
    y[i] = d.y[static_cast<std::size_t>(i)];
    w[i] = 1.0 + 0.5 * (i % 3);
  }
  std::vector<MlpLayer> grad;
  m.loss_and_gradient(d.X, y, w, &grad);
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t l = 0; l < m.layers().size(); ++l) {
    for (Eigen::Index k = 0; k < m.layers()[l].W.size(); ++k) {
      double& ref = m.layers()[l].W.data()[k];
      const double keep = ref;
      ref = keep + h;
      const double up = m.loss_and_gradient(d.X, y, w, nullptr);
      ref = keep - h;
      const double down = m.loss_and_gradient(d.X, y, w, nullptr);
      ref = keep;
      const double num = (up - down) / (2 * h);
      const double an = grad[l].W.data()[k];
      worst = std::max(worst, std::abs(num - an) / std::max(1e-8, std::abs(num) + std::abs(an)));
    }
    for (Eigen::Index k = 0; k < m.layers()[l].b.size(); ++k) {
      double& ref = m.layers()[l].b[k];
      const double keep = ref;
      ref = keep + h;
      const double up = m.loss_and_gradient(d.X, y, w, nullptr);
      ref = keep - h;
      const double down = m.loss_and_gradient(d.X, y, w, nullptr);
      ref = keep;
      const double num = (up - down) / (2 * h);
      const double an = grad[l].b[k];
      worst = std::max(worst, std::abs(num - an) / std::max(1e-8, std::abs(num) + std::abs(an)));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("mlp learns a linear boundary and is deterministic") {
  const auto d = linear_data(600, 6);
  MlpParams p;
  p.hidden = {16};
  p.max_epochs = 60;
  p.seed = 4;
  const auto a = Mlp::fit(d.X, d.y, p);
  const auto b = Mlp::fit(d.X, d.y, p);
  CHECK(a.predict_proba(d.X) == b.predict_proba(d.X));
  const auto proba = a.predict_proba(d.X);
  int correct = 0;
  for (std::size_t i = 0; i < d.y.size(); ++i) correct += (proba[static_cast<Eigen::Index>(i)] >= 0.5) == (d.y[i] == 1);
  CHECK(correct > 450);
}

TEST_CASE("hyperparameter parsing") {
  CHECK_THROWS_AS(gbt_params({{"n_round", 3}}), Error);
  CHECK_THROWS_AS(logreg_params({{"C", -1.0}}), Error);
  CHECK(gbt_params({{"eta", 0.1}}).eta == 0.1);
  CHECK(forest_params({{"n_trees", 7}}, 3).seed == 3);
  CHECK(mlp_params({{"hidden", {4, 2}}}, 0).hidden == std::vector<int>{4, 2});
  try {
    mlp_params({{"bogus", 1}}, 0);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("every model kind round trips through json") {
  const auto d = linear_data(200, 7);
  for (auto kind : {ModelKind::LogReg, ModelKind::Gbt, ModelKind::Mlp, ModelKind::RandomForest}) {
    ModelConfig c;
    c.kind = kind;
    c.seed = 5;
    if (kind == ModelKind::Mlp) c.hyper = {{"hidden", {4}}, {"max_epochs", 5}};
    if (kind == ModelKind::RandomForest) c.hyper = {{"n_trees", 5}};
    if (kind == ModelKind::Gbt) c.hyper = {{"n_rounds", 5}};
    const auto m = train(c, d.X, d.y, {"a", "b", "c"});
    const auto back = model_from_json(nlohmann::json::parse(to_json(*m).dump()));
    CHECK(back->kind() == kind);
    CHECK(back->feature_names() == m->feature_names());
    const auto p1 = m->predict_proba(d.X), p2 = back->predict_proba(d.X);
    for (Eigen::Index i = 0; i < p1.size(); ++i) CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-12));
  }
}

TEST_CASE("prediction checks the columns") {
  const auto d = linear_data(100, 8);
  ModelConfig c;
  c.kind = ModelKind::LogReg;
  const auto m = train(c, d.X, d.y, {"a", "b", "c"});
  try {
    m->predict_proba(Matrix(2, 2));
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
  }
  CHECK_THROWS_AS(predict_proba(*m, d.X, {"a", "c", "b"}), Error);
  CHECK(predict_proba(*m, d.X, {"a", "b", "c"}).size() == 100);
}
