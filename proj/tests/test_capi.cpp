// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <virality/virality.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  vr_string_free(s);
  return out;
}

vr_dataset* synth(int n, int seed) {
  vr_dataset* ds = nullptr;
  const std::string cfg = "{\"n_posts\":" + std::to_string(n) + ",\"seed\":" + std::to_string(seed) + "}";
  REQUIRE(vr_dataset_synth(cfg.c_str(), &ds) == VR_OK);
  return ds;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(vr_version()) > 0);
  CHECK(std::string(vr_status_name(VR_OK)) == "ok");
  CHECK(std::string(vr_status_name(VR_ERR_SCHEMA)) == "schema");
  CHECK(vr_command_count() > 5);
  bool has_sweep = false;
  for (size_t i = 0; i < vr_command_count(); ++i) has_sweep |= std::string(vr_command_name(i)) == "sweep";
  CHECK(has_sweep);
  CHECK(vr_command_name(1000) == nullptr);
}

TEST_CASE("null arguments are rejected with a message") {
  CHECK(vr_dataset_load(nullptr, nullptr, nullptr) == VR_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vr_last_error()) > 0);
  vr_dataset* ds = nullptr;
  CHECK(vr_dataset_load("/nonexistent/x.jsonl", &ds, nullptr) == VR_ERR_IO);
  CHECK(ds == nullptr);
  CHECK(vr_dataset_size(nullptr) == 0);
  vr_dataset_free(nullptr);
  vr_string_free(nullptr);
}

TEST_CASE("synthetic dataset: planted labels, save and load") {
  vr_dataset* ds = synth(200, 3);
  CHECK(vr_dataset_size(ds) == 200);
  std::vector<int> planted(200);
  REQUIRE(vr_dataset_planted(ds, planted.data(), planted.size()) == VR_OK);
  int pos = 0;
  for (int v : planted) pos += v;
  CHECK(pos == 10);
  CHECK(vr_dataset_planted(ds, planted.data(), 5) == VR_ERR_INVALID_ARGUMENT);

  char* report = nullptr;
  REQUIRE(vr_dataset_validate(ds, &report) == VR_OK);
  CHECK(take(report) == "{}");

  const auto path = (std::filesystem::temp_directory_path() / "virality_capi_posts.jsonl").string();
  REQUIRE(vr_dataset_save(ds, path.c_str()) == VR_OK);
  vr_dataset* back = nullptr;
  char* diag = nullptr;
  REQUIRE(vr_dataset_load(path.c_str(), &back, &diag) == VR_OK);
  CHECK(take(diag) == "[]");
  CHECK(vr_dataset_size(back) == 200);
  char *fa = nullptr, *fb = nullptr;
  vr_dataset_fingerprint(ds, &fa);
  vr_dataset_fingerprint(back, &fb);
  CHECK(take(fa) == take(fb));

  char* summary = nullptr;
  REQUIRE(vr_dataset_filter(back, nullptr, &summary) == VR_OK);
  CHECK(take(summary).find("\"kept\":200") != std::string::npos);
  vr_dataset_free(back);
  vr_dataset_free(ds);
}

TEST_CASE("labeling through handles") {
  vr_dataset* ds = synth(300, 5);
  vr_labeling* lab = nullptr;
  REQUIRE(vr_labeling_fit(ds, "{\"trees\":20,\"seed\":1}", &lab) == VR_OK);
  const double tau = vr_labeling_tau(lab);
  std::vector<int> labels(300);
  std::vector<double> scores(300);
  REQUIRE(vr_labeling_apply(lab, ds, labels.data(), scores.data(), 300) == VR_OK);
  for (size_t i = 0; i < 300; ++i) CHECK(labels[i] == (scores[i] >= tau ? 1 : 0));

  char* text = nullptr;
  REQUIRE(vr_labeling_to_json(lab, &text) == VR_OK);
  vr_labeling* lab2 = nullptr;
  REQUIRE(vr_labeling_from_json(text, &lab2) == VR_OK);
  vr_string_free(text);
  CHECK(vr_labeling_tau(lab2) == tau);
  CHECK(vr_labeling_from_json("{\"nope\":1}", &lab2) != VR_OK);
  CHECK(vr_labeling_fit(ds, "{\"weights\":\"other\"}", &lab2) == VR_ERR_CONFIG);
  vr_labeling_free(lab2);
  vr_labeling_free(lab);
  vr_dataset_free(ds);
}

TEST_CASE("model train, predict and persist") {
  const size_t rows = 200, cols = 2;
  std::vector<double> X(rows * cols);
  std::vector<int> y(rows);
  for (size_t i = 0; i < rows; ++i) {
    y[i] = i % 4 == 0;
    X[i * cols] = static_cast<double>(y[i]) * 2.0 + static_cast<double>(i % 7) * 0.1;
    X[i * cols + 1] = static_cast<double>(i % 5);
  }
  const char* names[] = {"signal", "noise"};
  vr_model* m = nullptr;
  REQUIRE(vr_model_train("{\"kind\":\"gbt\",\"hyper\":{\"n_rounds\":10},\"seed\":1}", X.data(), rows, cols, y.data(),
                         names, &m) == VR_OK);
  CHECK(vr_model_n_features(m) == 2);
  std::vector<double> p(rows);
  REQUIRE(vr_model_predict(m, X.data(), rows, cols, p.data()) == VR_OK);
  double pr = 0, roc = 0;
  REQUIRE(vr_metrics(y.data(), p.data(), rows, 0.5, &pr, &roc, nullptr) == VR_OK);
  CHECK(roc == doctest::Approx(1.0));
  double imp[2];
  REQUIRE(vr_model_importances(m, imp, 2) == VR_OK);
  CHECK(imp[0] > imp[1]);

  CHECK(vr_model_predict(m, X.data(), rows, 3, p.data()) == VR_ERR_SCHEMA);
  char* text = nullptr;
  REQUIRE(vr_model_to_json(m, &text) == VR_OK);
  vr_model* back = nullptr;
  REQUIRE(vr_model_from_json(text, &back) == VR_OK);
  vr_string_free(text);
  std::vector<double> q(rows);
  vr_model_predict(back, X.data(), rows, cols, q.data());
  CHECK(q == p);

  CHECK(vr_model_train("{\"kind\":\"gbt\",\"hyper\":{\"depth\":3}}", X.data(), rows, cols, y.data(), nullptr, &back) ==
        VR_ERR_CONFIG);
  CHECK(vr_model_train("{\"kind\":\"svm\"}", X.data(), rows, cols, y.data(), nullptr, &back) == VR_ERR_CONFIG);
  vr_model_free(back);
  vr_model_free(m);
}

TEST_CASE("metrics with a single class fail") {
  const int y[] = {0, 0, 0};
  const double s[] = {0.1, 0.2, 0.3};
  double roc = 0;
  CHECK(vr_metrics(y, s, 3, 0.5, nullptr, &roc, nullptr) == VR_ERR_METRIC);
}

TEST_CASE("pipeline commands run through vr_run") {
  const auto dir = std::filesystem::temp_directory_path() / "virality_capi_run";
  std::filesystem::remove_all(dir);
  const std::string req = "{\"n_posts\":300,\"seed\":2,\"out\":\"" + dir.string() + "\"}";
  char* result = nullptr;
  REQUIRE(vr_run("synth", req.c_str(), &result) == VR_OK);
  vr_string_free(result);
  CHECK(std::filesystem::exists(dir / "posts.jsonl"));
  CHECK(vr_run("bogus", "{}", &result) == VR_ERR_CONFIG);
  CHECK(vr_run("synth", "{\"unknown_key\":1}", &result) == VR_ERR_CONFIG);
}
