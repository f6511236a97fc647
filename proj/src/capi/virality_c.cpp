// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/virality.h"

#include <cstring>
#include <fstream>
#include <string>

#include "virality/common.hpp"
#include "virality/eval.hpp"
#include "virality/ingest.hpp"
#include "virality/labeling.hpp"
#include "virality/models.hpp"
#include "virality/pipeline.hpp"
#include "virality/synth.hpp"

using nlohmann::json;

struct vr_dataset {
  std::vector<virality::PostRecord> records;
  std::vector<int> planted;
};

struct vr_labeling {
  virality::labeling::LabelingArtifacts artifacts;
};

struct vr_model {
  std::unique_ptr<virality::models::TrainedModel> model;
};

namespace {

thread_local std::string g_last_error;

vr_status status_of(virality::ErrorKind k) {
  using virality::ErrorKind;
  switch (k) {
    case ErrorKind::Io: return VR_ERR_IO;
    case ErrorKind::Parse: return VR_ERR_PARSE;
    case ErrorKind::Validation: return VR_ERR_VALIDATION;
    case ErrorKind::Domain: return VR_ERR_DOMAIN;
    case ErrorKind::Fit: return VR_ERR_FIT;
    case ErrorKind::Schema: return VR_ERR_SCHEMA;
    case ErrorKind::Config: return VR_ERR_CONFIG;
    case ErrorKind::Split: return VR_ERR_SPLIT;
    case ErrorKind::Metric: return VR_ERR_METRIC;
    case ErrorKind::Fold: return VR_ERR_FOLD;
    case ErrorKind::Degenerate: return VR_ERR_DEGENERATE;
  }
  return VR_ERR_INTERNAL;
}

vr_status set_error(vr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
vr_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return VR_OK;
  } catch (const virality::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const json::exception& e) {
    return set_error(VR_ERR_PARSE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(VR_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(VR_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(VR_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

json options(const char* text) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  if (!j.is_object()) virality::fail(virality::ErrorKind::Config, "options must be a JSON object");
  return j;
}

#define VR_REQUIRE(cond, msg) \
  if (!(cond)) return set_error(VR_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* vr_version(void) { return "0.1.0"; }

const char* vr_status_name(vr_status s) {
  switch (s) {
    case VR_OK: return "ok";
    case VR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case VR_ERR_IO: return "io";
    case VR_ERR_PARSE: return "parse";
    case VR_ERR_VALIDATION: return "validation";
    case VR_ERR_DOMAIN: return "domain";
    case VR_ERR_FIT: return "fit";
    case VR_ERR_SCHEMA: return "schema";
    case VR_ERR_CONFIG: return "config";
    case VR_ERR_SPLIT: return "split";
    case VR_ERR_METRIC: return "metric";
    case VR_ERR_FOLD: return "fold";
    case VR_ERR_DEGENERATE: return "degenerate";
    case VR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* vr_last_error(void) { return g_last_error.c_str(); }

void vr_string_free(char* s) { std::free(s); }

// ---- datasets ---------------------------------------------------------------

vr_status vr_dataset_load(const char* path, vr_dataset** out, char** diagnostics_json) {
  VR_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto parsed = virality::parse_dataset(path);
    auto ds = std::make_unique<vr_dataset>();
    ds->records = std::move(parsed.records);
    if (diagnostics_json) {
      json d = json::array();
      for (const auto& x : parsed.diagnostics) d.push_back({{"line", x.line}, {"message", x.message}});
      *diagnostics_json = dup_string(d.dump());
    }
    *out = ds.release();
  });
}

vr_status vr_dataset_synth(const char* config_json, vr_dataset** out) {
  VR_REQUIRE(out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto corpus = virality::synth::generate(virality::synth::synth_config_from_json(options(config_json)));
    auto ds = std::make_unique<vr_dataset>();
    ds->records = std::move(corpus.records);
    ds->planted = std::move(corpus.planted);
    *out = ds.release();
  });
}

vr_status vr_dataset_save(const vr_dataset* ds, const char* path) {
  VR_REQUIRE(ds && path, "null argument");
  return guarded([&] { virality::write_dataset(path, ds->records); });
}

size_t vr_dataset_size(const vr_dataset* ds) { return ds ? ds->records.size() : 0; }

vr_status vr_dataset_filter(vr_dataset* ds, const char* options_json, char** summary_json) {
  VR_REQUIRE(ds, "null argument");
  return guarded([&] {
    const json o = options(options_json);
    virality::FilterOptions fo;
    fo.min_tracking_minutes = o.value("min_tracking_minutes", fo.min_tracking_minutes);
    fo.max_gap_minutes = o.value("max_gap_minutes", fo.max_gap_minutes);
    std::vector<char> keep;
    if (!ds->planted.empty())
      for (const auto& r : ds->records) keep.push_back(!virality::filter_reason(r, fo));
    virality::FilterSummary summary;
    ds->records = virality::apply_quality_filters(std::move(ds->records), fo, &summary);
    if (!ds->planted.empty()) {
      std::vector<int> planted;
      for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) planted.push_back(ds->planted[i]);
      ds->planted = std::move(planted);
    }
    if (summary_json) *summary_json = dup_string(virality::to_json(summary).dump());
  });
}

vr_status vr_dataset_validate(const vr_dataset* ds, char** report_json) {
  VR_REQUIRE(ds && report_json, "null argument");
  return guarded([&] {
    json j = json::object();
    for (const auto& [id, report] : virality::validate_dataset(ds->records)) {
      if (report.empty()) continue;
      json list = json::array();
      for (const auto& v : report) list.push_back(v.message);
      j[id] = list;
    }
    *report_json = dup_string(j.dump());
  });
}

vr_status vr_dataset_fingerprint(const vr_dataset* ds, char** out) {
  VR_REQUIRE(ds && out, "null argument");
  return guarded([&] { *out = dup_string(virality::dataset_fingerprint(ds->records)); });
}

vr_status vr_dataset_planted(const vr_dataset* ds, int* labels, size_t n) {
  VR_REQUIRE(ds && labels, "null argument");
  VR_REQUIRE(!ds->planted.empty(), "dataset has no planted labels");
  VR_REQUIRE(n == ds->planted.size(), "length does not match dataset size");
  std::copy(ds->planted.begin(), ds->planted.end(), labels);
  return VR_OK;
}

void vr_dataset_free(vr_dataset* ds) { delete ds; }

// ---- labeling ---------------------------------------------------------------

vr_status vr_labeling_fit(const vr_dataset* train, const char* options_json, vr_labeling** out) {
  VR_REQUIRE(train && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const json o = options(options_json);
    virality::labeling::LabelingConfig c;
    c.top_frac = o.value("top_frac", c.top_frac);
    if (o.contains("windows")) c.windows = o["windows"].get<std::vector<double>>();
    c.forest.n_trees = o.value("trees", c.forest.n_trees);
    c.forest.seed = o.value("seed", c.forest.seed);
    const std::string w = o.value("weights", std::string("learned"));
    if (w == "published")
      c.preset = virality::labeling::published_weights();
    else if (w != "learned")
      virality::fail(virality::ErrorKind::Config, "weights must be learned or published");
    auto lab = std::make_unique<vr_labeling>();
    lab->artifacts = virality::labeling::fit_labeling(train->records, c);
    *out = lab.release();
  });
}

vr_status vr_labeling_from_json(const char* text, vr_labeling** out) {
  VR_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto lab = std::make_unique<vr_labeling>();
    lab->artifacts = virality::labeling::artifacts_from_json(json::parse(text));
    *out = lab.release();
  });
}

vr_status vr_labeling_to_json(const vr_labeling* lab, char** out) {
  VR_REQUIRE(lab && out, "null argument");
  return guarded([&] { *out = dup_string(virality::labeling::serialize(lab->artifacts)); });
}

double vr_labeling_tau(const vr_labeling* lab) { return lab ? lab->artifacts.threshold.tau : 0.0; }

vr_status vr_labeling_apply(const vr_labeling* lab, const vr_dataset* ds, int* labels, double* scores, size_t n) {
  VR_REQUIRE(lab && ds, "null argument");
  VR_REQUIRE(n == ds->records.size(), "length does not match dataset size");
  return guarded([&] {
    const auto s = virality::labeling::hybrid_scores(lab->artifacts, ds->records);
    for (std::size_t i = 0; i < n; ++i) {
      if (scores) scores[i] = s[i];
      if (labels) labels[i] = virality::labeling::assign_label(s[i], lab->artifacts.threshold.tau) ? 1 : 0;
    }
  });
}

void vr_labeling_free(vr_labeling* lab) { delete lab; }

// ---- models -----------------------------------------------------------------

namespace {

virality::models::Matrix to_matrix(const double* X, size_t rows, size_t cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      X, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

}  // namespace

vr_status vr_model_train(const char* config_json, const double* X, size_t rows, size_t cols, const int* y,
                         const char* const* names, vr_model** out) {
  VR_REQUIRE(X && y && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    json cfg = options(config_json);
    if (!cfg.contains("kind")) cfg["kind"] = "gbt";
    const auto mc = virality::models::model_config_from_json(cfg);
    std::vector<std::string> cols_named;
    for (size_t j = 0; j < cols; ++j) cols_named.push_back(names ? std::string(names[j]) : "f" + std::to_string(j));
    auto m = std::make_unique<vr_model>();
    m->model = virality::models::train(mc, to_matrix(X, rows, cols), std::vector<int>(y, y + rows), cols_named);
    *out = m.release();
  });
}

vr_status vr_model_predict(const vr_model* m, const double* X, size_t rows, size_t cols, double* proba) {
  VR_REQUIRE(m && X && proba, "null argument");
  return guarded([&] {
    const auto p = m->model->predict_proba(to_matrix(X, rows, cols));
    std::copy(p.data(), p.data() + p.size(), proba);
  });
}

size_t vr_model_n_features(const vr_model* m) { return m ? m->model->n_features() : 0; }

vr_status vr_model_importances(const vr_model* m, double* out, size_t n) {
  VR_REQUIRE(m && out, "null argument");
  VR_REQUIRE(n == m->model->n_features(), "length does not match the model");
  return guarded([&] {
    const auto imp = m->model->importances();
    std::copy(imp.begin(), imp.end(), out);
  });
}

vr_status vr_model_to_json(const vr_model* m, char** out) {
  VR_REQUIRE(m && out, "null argument");
  return guarded([&] { *out = dup_string(virality::models::to_json(*m->model).dump()); });
}

vr_status vr_model_from_json(const char* text, vr_model** out) {
  VR_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<vr_model>();
    m->model = virality::models::model_from_json(json::parse(text));
    *out = m.release();
  });
}

void vr_model_free(vr_model* m) { delete m; }

// ---- metrics ----------------------------------------------------------------

vr_status vr_metrics(const int* y, const double* scores, size_t n, double threshold, double* pr_auc, double* roc_auc,
                     double* f1) {
  VR_REQUIRE(y && scores, "null argument");
  return guarded([&] {
    const auto r = virality::eval::evaluate(std::vector<int>(y, y + n), std::vector<double>(scores, scores + n),
                                            threshold);
    if (pr_auc) *pr_auc = r.pr_auc;
    if (roc_auc) *roc_auc = r.roc_auc;
    if (f1) *f1 = r.f1;
  });
}

// ---- pipeline ---------------------------------------------------------------

size_t vr_command_count(void) { return virality::pipeline::commands().size(); }

const char* vr_command_name(size_t i) {
  const auto& c = virality::pipeline::commands();
  return i < c.size() ? c[i].data() : nullptr;
}

vr_status vr_run(const char* command, const char* request_json, char** result_json) {
  VR_REQUIRE(command, "null argument");
  return guarded([&] {
    const json result = virality::pipeline::run_command(command, options(request_json));
    if (result_json) *result_json = dup_string(result.dump());
  });
}

}  // extern "C"
