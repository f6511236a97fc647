// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "virality/common.hpp"

namespace virality::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

/// Runs fn(0..n-1) on up to `jobs` threads; the first exception wins.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + p.string() + "'");
  return out;
}

std::vector<int> pick(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json models = json::array();
  for (auto k : c.models) models.push_back(std::string(to_string(k)));
  json hyper = json::object();
  for (const auto& [k, h] : c.hyper) hyper[std::string(to_string(k))] = h;
  json mods = json::array();
  for (auto m : c.modalities) mods.push_back(std::string(to_string(m)));
  json lab = {{"top_frac", c.labeling.top_frac},
              {"windows", c.labeling.windows},
              {"forest_trees", c.labeling.forest.n_trees}};
  if (c.labeling.preset) lab["preset"] = labeling::to_json(*c.labeling.preset);
  return {{"windows", c.windows},
          {"models", models},
          {"hyper", hyper},
          {"train_frac", c.train_frac},
          {"cv_folds", c.cv_folds},
          {"run_cv", c.run_cv},
          {"seed", c.seed},
          {"decision_threshold", c.decision_threshold},
          {"labeling", lab},
          {"modalities", mods},
          {"ablation_window", c.ablation_window},
          {"top_k", c.top_k},
          {"importance", std::string(to_string(c.importance))}};
}

std::string config_hash(const ExperimentConfig& c) { return Fnv1a().update(to_json(c).dump()).hex(); }

models::ModelConfig model_config(const ExperimentConfig& c, models::ModelKind kind) {
  models::ModelConfig mc;
  mc.kind = kind;
  mc.seed = c.seed;
  if (auto it = c.hyper.find(kind); it != c.hyper.end()) mc.hyper = it->second;
  return mc;
}

PreparedData prepare_with(std::vector<PostRecord> records, const ExperimentConfig& c,
                          const labeling::LabelingArtifacts& artifacts) {
  PreparedData d;
  d.records = std::move(records);
  d.split = eval::chronological_split(d.records, c.train_frac);
  d.labeling = artifacts;
  d.y = labeling::apply_labeling(d.labeling, d.records);
  return d;
}

PreparedData prepare(std::vector<PostRecord> records, const ExperimentConfig& c) {
  const auto split = eval::chronological_split(records, c.train_frac);
  std::vector<PostRecord> train;
  train.reserve(split.train.size());
  for (std::size_t i : split.train) train.push_back(records[i]);
  labeling::LabelingConfig lc = c.labeling;
  lc.forest.seed = c.seed;
  const auto artifacts = labeling::fit_labeling(train, lc);
  return prepare_with(std::move(records), c, artifacts);
}

MatrixProvider extracting_provider(const PreparedData& data, const std::set<Modality>& modalities) {
  return [&data, modalities](double window) {
    return features::assemble_matrix(data.records, features::WindowSpec(window), data.labeling.caps, modalities);
  };
}

std::string window_tag(double window) {
  if (window == std::floor(window)) return std::to_string(static_cast<long long>(window));
  return fmt(window);
}

fs::path feature_csv_path(const fs::path& dir, double window) {
  return dir / ("features_w" + window_tag(window) + ".csv");
}

fs::path feature_manifest_path(const fs::path& dir, double window) {
  return dir / ("features_w" + window_tag(window) + ".manifest.csv");
}

MatrixProvider precomputed_provider(const PreparedData& data, const fs::path& dir) {
  return [&data, dir](double window) {
    auto m = features::import_matrix(feature_csv_path(dir, window), feature_manifest_path(dir, window));
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < m.row_ids.size(); ++i) row_of.emplace(m.row_ids[i], i);
    std::vector<std::size_t> idx;
    idx.reserve(data.records.size());
    for (const auto& r : data.records) {
      auto it = row_of.find(r.post_id);
      if (it == row_of.end())
        fail(ErrorKind::Schema, "feature file for window " + window_tag(window) + " lacks post '" + r.post_id + "'");
      idx.push_back(it->second);
    }
    return m.select_rows(idx);
  };
}

void write_feature_files(const fs::path& dir, const PreparedData& data, const std::vector<double>& windows,
                         const std::set<Modality>& modalities, unsigned jobs) {
  fs::create_directories(dir);
  auto provider = extracting_provider(data, modalities);
  parallel_for(windows.size(), jobs, [&](std::size_t i) {
    features::export_matrix(provider(windows[i]), feature_csv_path(dir, windows[i]),
                            feature_manifest_path(dir, windows[i]));
  });
}

TrainedCell train_cell(const PreparedData& data, const features::FeatureMatrix& matrix, const models::ModelConfig& mc) {
  TrainedCell cell;
  const auto train_m = matrix.select_rows(data.split.train);
  cell.preprocess = preprocess::fit(train_m);
  cell.train_design = preprocess::transform(cell.preprocess, train_m);
  cell.model = models::train(mc, cell.train_design.X, pick(data.y, data.split.train), cell.train_design.names);
  return cell;
}

CellResult run_cell(const PreparedData& data, const features::FeatureMatrix& matrix, double window,
                    const ExperimentConfig& c, models::ModelKind kind, bool with_cv) {
  if (matrix.n_rows() != data.records.size()) fail(ErrorKind::Schema, "feature matrix rows do not match records");
  const auto mc = model_config(c, kind);
  CellResult out;
  out.window = window;
  out.model = kind;

  const auto train_m = matrix.select_rows(data.split.train);
  const auto test_m = matrix.select_rows(data.split.test);
  const auto pre = preprocess::fit(train_m);
  out.preprocess_fingerprint = preprocess::fingerprint(pre);
  const auto dtrain = preprocess::transform(pre, train_m);
  const auto dtest = preprocess::transform(pre, test_m);
  const auto ytr = pick(data.y, data.split.train);
  const auto yte = pick(data.y, data.split.test);

  const auto t0 = std::chrono::steady_clock::now();
  const auto model = models::train(mc, dtrain.X, ytr, dtrain.names);
  out.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.model_fingerprint = Fnv1a().update(models::to_json(*model).dump()).hex();

  const models::Vector p = models::predict_proba(*model, dtest.X, dtest.names);
  out.test = eval::evaluate(yte, std::vector<double>(p.data(), p.data() + p.size()), c.decision_threshold);
  if (with_cv) out.cv = eval::cross_validate(mc, train_m, ytr, c.cv_folds, c.seed, c.decision_threshold);

  std::vector<double> imp;
  if (const auto* gbt = dynamic_cast<const models::GradientBoostedTrees*>(model.get()))
    imp = gbt->importances(c.importance);
  else
    imp = model->importances();
  std::map<std::string, double> by_parent;
  for (std::size_t j = 0; j < dtrain.parents.size(); ++j) {
    by_parent[dtrain.parents[j]] += imp.empty() ? 0.0 : imp[j];
    out.parent_modality[dtrain.parents[j]] = dtrain.modalities[j];
  }
  out.parent_importance.assign(by_parent.begin(), by_parent.end());
  return out;
}

std::vector<CellResult> run_window_sweep(const PreparedData& data, const ExperimentConfig& c,
                                         const MatrixProvider& provider) {
  std::vector<features::FeatureMatrix> mats(c.windows.size());
  parallel_for(c.windows.size(), c.jobs, [&](std::size_t i) { mats[i] = provider(c.windows[i]); });
  std::vector<CellResult> out(c.windows.size() * c.models.size());
  parallel_for(out.size(), c.jobs, [&](std::size_t k) {
    const std::size_t w = k / c.models.size(), m = k % c.models.size();
    out[k] = run_cell(data, mats[w], c.windows[w], c, c.models[m], c.run_cv);
  });
  return out;
}

std::vector<AblationRow> run_ablation(const PreparedData& data, const ExperimentConfig& c,
                                      const MatrixProvider& provider) {
  const auto full = provider(c.ablation_window);
  const std::vector<std::pair<std::string, std::optional<Modality>>> designs = {
      {"none", std::nullopt},
      {"contextual", Modality::Contextual},
      {"visual", Modality::Visual},
      {"textual", Modality::Textual},
      {"network", Modality::Network},
      {"temporal", Modality::Temporal}};
  std::vector<AblationRow> rows(designs.size());
  parallel_for(designs.size(), c.jobs, [&](std::size_t i) {
    std::set<Modality> keep = features::all_modalities();
    if (designs[i].second) keep.erase(*designs[i].second);
    const auto m = full.select_modalities(keep);
    rows[i] = {designs[i].first, run_cell(data, m, c.ablation_window, c, models::ModelKind::Gbt, false).test};
  });
  return rows;
}

ImportanceWindow count_top_k(double window, std::vector<std::pair<std::string, double>> parent_importance,
                             const std::map<std::string, Modality>& modality, int top_k) {
  if (top_k < 1) fail(ErrorKind::Config, "top_k must be positive");
  std::sort(parent_importance.begin(), parent_importance.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  ImportanceWindow w;
  w.window = window;
  for (Modality m : kAllModalities) w.counts[m] = 0;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(top_k), parent_importance.size());
  for (std::size_t i = 0; i < k; ++i) {
    w.counts[modality.at(parent_importance[i].first)]++;
    w.ranked.push_back(parent_importance[i]);
  }
  return w;
}

std::vector<ImportanceWindow> importance_over_time(const PreparedData& data, const ExperimentConfig& c,
                                                   const MatrixProvider& provider) {
  std::vector<ImportanceWindow> out(c.windows.size());
  parallel_for(c.windows.size(), c.jobs, [&](std::size_t i) {
    const auto cell = run_cell(data, provider(c.windows[i]), c.windows[i], c, models::ModelKind::Gbt, false);
    out[i] = count_top_k(c.windows[i], cell.parent_importance, cell.parent_modality, c.top_k);
  });
  return out;
}

// ---------------------------------------------------------------------------

void write_sweep_reports(const fs::path& dir, const std::vector<CellResult>& rows) {
  auto test = open_out(dir / "window_sweep.csv");
  test << "window,model,pr_auc,roc_auc,f1,duration_seconds\n";
  auto longf = open_out(dir / "window_sweep_long.csv");
  longf << "window,model,source,metric,value\n";
  bool any_cv = false;
  for (const auto& r : rows) {
    const std::string w = window_tag(r.window), m(to_string(r.model));
    test << w << ',' << m << ',' << fmt(r.test.pr_auc) << ',' << fmt(r.test.roc_auc) << ',' << fmt(r.test.f1) << ','
         << fmt(r.duration_seconds) << '\n';
    longf << w << ',' << m << ",test,pr_auc," << fmt(r.test.pr_auc) << '\n'
          << w << ',' << m << ",test,roc_auc," << fmt(r.test.roc_auc) << '\n'
          << w << ',' << m << ",test,f1," << fmt(r.test.f1) << '\n';
    if (r.cv) {
      any_cv = true;
      longf << w << ',' << m << ",cv,pr_auc," << fmt(r.cv->mean.pr_auc) << '\n'
            << w << ',' << m << ",cv,roc_auc," << fmt(r.cv->mean.roc_auc) << '\n'
            << w << ',' << m << ",cv,f1," << fmt(r.cv->mean.f1) << '\n';
    }
  }
  if (!any_cv) return;
  auto cv = open_out(dir / "window_sweep_cv.csv");
  cv << "window,model,pr_auc_mean,pr_auc_std,roc_auc_mean,roc_auc_std,f1_mean,f1_std\n";
  for (const auto& r : rows) {
    if (!r.cv) continue;
    cv << window_tag(r.window) << ',' << to_string(r.model) << ',' << fmt(r.cv->mean.pr_auc) << ','
       << fmt(r.cv->std.pr_auc) << ',' << fmt(r.cv->mean.roc_auc) << ',' << fmt(r.cv->std.roc_auc) << ','
       << fmt(r.cv->mean.f1) << ',' << fmt(r.cv->std.f1) << '\n';
  }
}

void write_ablation_report(const fs::path& dir, double window, const std::vector<AblationRow>& rows) {
  auto out = open_out(dir / ("ablation_" + window_tag(window) + ".csv"));
  out << "excluded,pr_auc,roc_auc,f1\n";
  for (const auto& r : rows)
    out << r.excluded << ',' << fmt(r.test.pr_auc) << ',' << fmt(r.test.roc_auc) << ',' << fmt(r.test.f1) << '\n';
}

void write_importance_reports(const fs::path& dir, const std::vector<ImportanceWindow>& rows) {
  auto wide = open_out(dir / "modality_importance.csv");
  auto longf = open_out(dir / "modality_importance_long.csv");
  auto top = open_out(dir / "top_features.csv");
  wide << "window";
  for (Modality m : kAllModalities) wide << ',' << to_string(m);
  wide << '\n';
  longf << "window,modality,count\n";
  top << "window,rank,feature,importance\n";
  for (const auto& r : rows) {
    const std::string w = window_tag(r.window);
    wide << w;
    for (Modality m : kAllModalities) {
      const int cnt = r.counts.count(m) ? r.counts.at(m) : 0;
      wide << ',' << cnt;
      longf << w << ',' << to_string(m) << ',' << cnt << '\n';
    }
    wide << '\n';
    for (std::size_t i = 0; i < r.ranked.size(); ++i)
      top << w << ',' << i + 1 << ',' << r.ranked[i].first << ',' << fmt(r.ranked[i].second) << '\n';
  }
}

void write_group_rates(const fs::path& dir, const std::vector<PostRecord>& records, const std::vector<int>& y) {
  if (records.size() != y.size()) fail(ErrorKind::Schema, "labels misaligned with records");
  auto blob_value = [](const PostRecord& r, const char* key) -> std::string {
    if (!r.static_features) return "missing";
    auto it = r.static_features->find(key);
    if (it == r.static_features->end()) return "missing";
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    return "missing";
  };
  const std::vector<std::pair<std::string, std::function<std::string(const PostRecord&)>>> groups = {
      {"language", [](const PostRecord& r) { return std::string(to_string(r.subreddit.language_group)); }},
      {"hour", [](const PostRecord& r) { return std::to_string(((r.created_utc % 86400) + 86400) % 86400 / 3600); }},
      {"weekday",
       [](const PostRecord& r) {
         const std::int64_t days = (r.created_utc >= 0 ? r.created_utc : r.created_utc - 86399) / 86400;
         return std::to_string(((days + 3) % 7 + 7) % 7);
       }},
      {"media_type", [](const PostRecord& r) { return std::string(to_string(r.media_type)); }},
      {"template", [&](const PostRecord& r) { return blob_value(r, "template_name"); }},
      {"topic", [&](const PostRecord& r) { return blob_value(r, "primary_topic"); }},
      {"meme_type", [&](const PostRecord& r) { return blob_value(r, "meme_type"); }},
  };
  for (const auto& [name, key] : groups) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> agg;
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto& a = agg[key(records[i])];
      ++a.first;
      a.second += static_cast<std::size_t>(y[i]);
    }
    auto out = open_out(dir / ("virality_by_" + name + ".csv"));
    out << "value,n_posts,n_viral,rate\n";
    for (const auto& [value, a] : agg)
      out << value << ',' << a.first << ',' << a.second << ','
          << fmt(static_cast<double>(a.second) / static_cast<double>(a.first)) << '\n';
  }
}

void write_labels_csv(const fs::path& path, const PreparedData& data) {
  const auto scores = labeling::hybrid_scores(data.labeling, data.records);
  std::vector<std::string> split(data.records.size(), "train");
  for (std::size_t i : data.split.test) split[i] = "test";
  auto out = open_out(path);
  out << "post_id,split,hybrid_score,label\n";
  for (std::size_t i = 0; i < data.records.size(); ++i)
    out << data.records[i].post_id << ',' << split[i] << ',' << fmt(scores[i]) << ',' << data.y[i] << '\n';
}

json manifest(const PreparedData& data, const ExperimentConfig& c, const std::string& command) {
  std::size_t pos_train = 0, pos_test = 0;
  for (std::size_t i : data.split.train) pos_train += static_cast<std::size_t>(data.y[i]);
  for (std::size_t i : data.split.test) pos_test += static_cast<std::size_t>(data.y[i]);
  return {{"command", command},
          {"config", to_json(c)},
          {"config_hash", config_hash(c)},
          {"seeds", {{"global", c.seed}, {"models", c.seed}, {"cv", c.seed}, {"labeling_forest", c.seed}}},
          {"dataset_fingerprint", dataset_fingerprint(data.records)},
          {"split",
           {{"n_train", data.split.train.size()},
            {"n_test", data.split.test.size()},
            {"boundary_utc", format_iso8601_utc(data.split.boundary)},
            {"positives_train", pos_train},
            {"positives_test", pos_test}}},
          {"labeling_fingerprint", Fnv1a().update(labeling::serialize(data.labeling)).hex()},
          {"training_fingerprint", data.labeling.training_fingerprint}};
}

void write_manifest(const fs::path& dir, const json& m) {
  auto out = open_out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

}  // namespace virality::experiments
