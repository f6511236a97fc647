// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/pipeline.hpp"

#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "virality/collector.hpp"
#include "virality/common.hpp"
#include "virality/synth.hpp"

namespace virality::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
namespace ex = virality::experiments;

namespace {

// Keys shared by every command that loads a dataset and builds an experiment.
const std::set<std::string> kExperimentKeys = {
    "data",        "out",        "from",         "labeling",     "features_dir", "seed",
    "jobs",        "filter",     "min_tracking_minutes",          "max_gap_minutes",
    "train_frac",  "windows",    "models",       "hyper",        "cv_folds",     "run_cv",
    "decision_threshold",        "top_frac",     "label_windows", "label_trees", "weights",
    "modalities",  "ablation_window",            "top_k",        "importance",   "window",
    "model",       "preprocess"};

const std::set<std::string> kSynthKeys = {
    "out",          "n_posts",          "viral_frac",          "placement",          "min_subscribers",
    "max_subscribers",                  "viral_plateau_median", "viral_plateau_sigma", "takeoff_mean",
    "takeoff_sd",   "peak_mean",        "peak_sd",             "nonviral_plateau_median",
    "nonviral_plateau_sigma",           "nonviral_rate_min",   "nonviral_rate_max",  "noise_scale",
    "tracking_minutes",                 "static_missing_rate", "start_utc",          "mean_gap_minutes",
    "seed"};

const std::set<std::string> kValidateKeys = {"data", "out", "min_tracking_minutes", "max_gap_minutes"};

const std::set<std::string> kCollectKeys = {"ids",  "source",      "replay",        "base_url", "auth_header",
                                            "out",  "until_minutes", "clock",       "jobs",     "max_retries",
                                            "timeout_seconds"};

void check_keys(const json& req, const std::set<std::string>& allowed, std::string_view command) {
  if (!req.is_object()) fail(ErrorKind::Config, "request must be a JSON object");
  for (const auto& [k, v] : req.items())
    if (!allowed.count(k)) fail(ErrorKind::Config, std::string(command) + ": unknown option '" + k + "'");
}

template <class T>
T get_or(const json& req, const char* key, T fallback) {
  auto it = req.find(key);
  if (it == req.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::Config, std::string("option '") + key + "' has the wrong type");
  }
}

fs::path require_path(const json& req, const char* key) {
  const auto s = get_or<std::string>(req, key, "");
  if (s.empty()) fail(ErrorKind::Config, std::string("missing required option '") + key + "'");
  return s;
}

fs::path out_dir(const json& req) {
  fs::path out = get_or<std::string>(req, "out", "");
  if (out.empty()) fail(ErrorKind::Config, "missing required option 'out'");
  fs::create_directories(out);
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot write '" + p.string() + "'");
  f << text;
}

json read_json(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot read '" + p.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, p.string() + ": " + e.what());
  }
}

FilterOptions filter_options(const json& req) {
  FilterOptions o;
  o.min_tracking_minutes = get_or(req, "min_tracking_minutes", o.min_tracking_minutes);
  o.max_gap_minutes = get_or(req, "max_gap_minutes", o.max_gap_minutes);
  return o;
}

/// Strict load: malformed lines and invariant violations are data errors.
std::vector<PostRecord> load_records(const json& req, FilterSummary* summary) {
  auto parsed = parse_dataset(require_path(req, "data"));
  if (!parsed.diagnostics.empty()) {
    const auto& d = parsed.diagnostics.front();
    fail(ErrorKind::Parse, std::to_string(parsed.diagnostics.size()) + " malformed line(s); line " +
                               std::to_string(d.line) + ": " + d.message);
  }
  for (const auto& [id, report] : validate_dataset(parsed.records))
    if (!report.empty()) fail(ErrorKind::Validation, "record '" + id + "': " + report.front().message);
  if (!get_or(req, "filter", true)) return std::move(parsed.records);
  return apply_quality_filters(std::move(parsed.records), filter_options(req), summary);
}

std::vector<double> number_list(const json& req, const char* key, std::vector<double> fallback) {
  auto it = req.find(key);
  if (it == req.end()) return fallback;
  std::vector<double> out;
  if (it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_number()) fail(ErrorKind::Config, std::string("option '") + key + "' must list numbers");
      out.push_back(v.get<double>());
    }
  } else if (it->is_number()) {
    out.push_back(it->get<double>());
  } else {
    fail(ErrorKind::Config, std::string("option '") + key + "' must list numbers");
  }
  if (out.empty()) fail(ErrorKind::Config, std::string("option '") + key + "' is empty");
  for (double w : out)
    if (!(w > 0)) fail(ErrorKind::Config, std::string("option '") + key + "' needs positive values");
  return out;
}

std::vector<std::string> string_list(const json& req, const char* key) {
  std::vector<std::string> out;
  auto it = req.find(key);
  if (it == req.end()) return out;
  if (it->is_string()) return {it->get<std::string>()};
  if (!it->is_array()) fail(ErrorKind::Config, std::string("option '") + key + "' must list strings");
  for (const auto& v : *it) {
    if (!v.is_string()) fail(ErrorKind::Config, std::string("option '") + key + "' must list strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

models::ModelKind parse_kind(const std::string& s) {
  auto k = models::model_kind_from_string(s);
  if (!k) fail(ErrorKind::Config, "unknown model '" + s + "'");
  return *k;
}

std::optional<fs::path> labeling_file(const json& req) {
  if (auto p = get_or<std::string>(req, "labeling", ""); !p.empty()) return fs::path(p);
  if (auto from = get_or<std::string>(req, "from", ""); !from.empty()) {
    fs::path p = fs::path(from) / "labeling.json";
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

ex::PreparedData prepare(const json& req, const ex::ExperimentConfig& c) {
  auto records = load_records(req, nullptr);
  if (auto p = labeling_file(req)) return ex::prepare_with(std::move(records), c, labeling::artifacts_from_json(read_json(*p)));
  return ex::prepare(std::move(records), c);
}

ex::MatrixProvider provider(const json& req, const ex::PreparedData& data, const ex::ExperimentConfig& c) {
  fs::path dir = get_or<std::string>(req, "features_dir", "");
  if (dir.empty()) {
    if (auto from = get_or<std::string>(req, "from", ""); !from.empty() && fs::is_directory(fs::path(from) / "features"))
      dir = fs::path(from) / "features";
  }
  if (!dir.empty()) {
    auto base = ex::precomputed_provider(data, dir);
    auto mods = c.modalities;
    return [base, mods](double w) { return base(w).select_modalities(mods); };
  }
  return ex::extracting_provider(data, c.modalities);
}

json label_summary(const ex::PreparedData& d) {
  std::size_t pos = 0;
  for (int v : d.y) pos += static_cast<std::size_t>(v);
  json weights = json::object();
  for (const auto& [k, v] : d.labeling.weights.weights) weights[k] = v;
  return {{"records", d.records.size()},
          {"train", d.split.train.size()},
          {"test", d.split.test.size()},
          {"positives", pos},
          {"positive_rate", d.records.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(d.records.size())},
          {"tau", d.labeling.threshold.tau},
          {"weights", weights}};
}

json cell_json(const ex::CellResult& r) {
  json j = {{"window", r.window},
            {"model", std::string(to_string(r.model))},
            {"test", eval::to_json(r.test)},
            {"duration_seconds", r.duration_seconds},
            {"preprocess_fingerprint", r.preprocess_fingerprint},
            {"model_fingerprint", r.model_fingerprint}};
  if (r.cv) j["cv"] = eval::to_json(*r.cv);
  return j;
}

// ---------------------------------------------------------------------------

json cmd_synth(const json& req) {
  check_keys(req, kSynthKeys, "synth");
  json cfg = req;
  cfg.erase("out");
  const auto config = synth::synth_config_from_json(cfg);
  const fs::path out = out_dir(req);
  const auto corpus = synth::generate(config);
  write_dataset(out / "posts.jsonl", corpus.records);
  std::ostringstream planted;
  planted << "post_id,planted\n";
  std::size_t pos = 0;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    planted << corpus.records[i].post_id << ',' << corpus.planted[i] << '\n';
    pos += static_cast<std::size_t>(corpus.planted[i]);
  }
  write_text(out / "planted.csv", planted.str());
  const json m = {{"command", "synth"},
                  {"config", synth::to_json(config)},
                  {"seeds", {{"global", config.seed}}},
                  {"dataset_fingerprint", dataset_fingerprint(corpus.records)}};
  write_text(out / "manifest.json", m.dump(2) + "\n");
  return {{"records", corpus.records.size()}, {"positives", pos}, {"data", (out / "posts.jsonl").string()}};
}

json cmd_validate(const json& req) {
  check_keys(req, kValidateKeys, "validate");
  auto parsed = parse_dataset(require_path(req, "data"));
  json diags = json::array();
  for (const auto& d : parsed.diagnostics) diags.push_back({{"line", d.line}, {"message", d.message}});
  json violations = json::object();
  for (const auto& [id, report] : validate_dataset(parsed.records)) {
    if (report.empty()) continue;
    json list = json::array();
    for (const auto& v : report) list.push_back(v.message);
    violations[id] = list;
  }
  FilterSummary summary;
  apply_quality_filters(parsed.records, filter_options(req), &summary);
  json result = {{"records", parsed.records.size()},
                 {"diagnostics", diags},
                 {"violations", violations},
                 {"filter", to_json(summary)},
                 {"valid", diags.empty() && violations.empty()}};
  if (req.contains("out")) write_text(out_dir(req) / "validation.json", result.dump(2) + "\n");
  return result;
}

json cmd_collect(const json& req) {
  check_keys(req, kCollectKeys, "collect");
  const fs::path out = out_dir(req);
  std::vector<std::string> ids;
  std::map<std::string, double> created;
  {
    std::ifstream f(require_path(req, "ids"));
    if (!f) fail(ErrorKind::Io, "cannot read id list");
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      const std::string id = line.substr(0, comma);
      ids.push_back(id);
      if (comma != std::string::npos) created[id] = static_cast<double>(parse_iso8601_utc(line.substr(comma + 1)));
    }
  }
  const double until = get_or(req, "until_minutes", 1440.0);
  const auto clock_kind = get_or<std::string>(req, "clock", "simulated");
  if (clock_kind != "simulated" && clock_kind != "system") fail(ErrorKind::Config, "clock must be simulated or system");

  std::mutex clocks_mutex;
  std::map<std::string, collector::Clock*> clocks;
  auto make_clock = [&](const std::string& id) -> std::unique_ptr<collector::Clock> {
    std::unique_ptr<collector::Clock> c;
    if (clock_kind == "system") {
      auto it = created.find(id);
      if (it == created.end()) fail(ErrorKind::Config, "system clock needs a creation time for '" + id + "'");
      c = std::make_unique<collector::SystemClock>(it->second);
    } else {
      c = std::make_unique<collector::SimulatedClock>();
    }
    std::lock_guard lock(clocks_mutex);
    clocks[id] = c.get();
    return c;
  };

  std::unique_ptr<collector::PostSource> source;
  const auto kind = get_or<std::string>(req, "source", "replay");
  if (kind == "replay") {
    source = std::make_unique<collector::FileReplaySource>(
        collector::FileReplaySource::load(require_path(req, "replay")), [&](const std::string& id) {
          std::lock_guard lock(clocks_mutex);
          return clocks.at(id)->now_minutes();
        });
  } else if (kind == "http") {
    collector::HttpPostSource::Options o;
    o.base_url = get_or<std::string>(req, "base_url", "");
    if (o.base_url.empty()) fail(ErrorKind::Config, "http source needs base_url");
    o.auth_header = get_or<std::string>(req, "auth_header", "");
    o.timeout_seconds = get_or(req, "timeout_seconds", o.timeout_seconds);
    source = std::make_unique<collector::HttpPostSource>(o);
  } else {
    fail(ErrorKind::Config, "unknown source '" + kind + "'");
  }
  collector::RetryPolicy retry;
  retry.max_retries = get_or(req, "max_retries", retry.max_retries);
  const auto results = collector::track_posts(*source, ids, until, collector::PollSchedule::default_schedule(),
                                              make_clock, get_or(req, "jobs", 1u), retry);
  std::ostringstream lines;
  std::map<std::string, std::size_t> reasons;
  std::size_t snaps = 0;
  for (const auto& r : results) {
    lines << collector::to_json(r).dump() << '\n';
    reasons[std::string(to_string(r.reason))]++;
    snaps += r.snapshots.size();
  }
  write_text(out / "tracks.jsonl", lines.str());
  return {{"posts", results.size()}, {"snapshots", snaps}, {"termination", reasons}};
}

json cmd_label(const json& req) {
  check_keys(req, kExperimentKeys, "label");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const auto data = prepare(req, c);
  write_text(out / "labeling.json", labeling::serialize(data.labeling));
  ex::write_labels_csv(out / "labels.csv", data);
  ex::write_group_rates(out / "group_rates", data.records, data.y);
  ex::write_manifest(out, ex::manifest(data, c, "label"));
  return label_summary(data);
}

json cmd_features(const json& req) {
  check_keys(req, kExperimentKeys, "features");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const auto data = prepare(req, c);
  write_text(out / "labeling.json", labeling::serialize(data.labeling));
  ex::write_feature_files(out / "features", data, c.windows, features::all_modalities(), c.jobs);
  auto m = ex::manifest(data, c, "features");
  json files = json::array();
  for (double w : c.windows) {
    std::ifstream f(ex::feature_csv_path(out / "features", w), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    files.push_back({{"window", w}, {"fingerprint", Fnv1a().update(ss.str()).hex()}});
  }
  m["feature_files"] = files;
  ex::write_manifest(out, m);
  return {{"windows", c.windows}, {"rows", data.records.size()}, {"dir", (out / "features").string()}};
}

json cmd_train(const json& req) {
  check_keys(req, kExperimentKeys, "train");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const double window = get_or(req, "window", 120.0);
  const auto kind = parse_kind(get_or<std::string>(req, "model", "gbt"));
  const auto data = prepare(req, c);
  const auto matrix = provider(req, data, c)(window);
  const auto cell = ex::train_cell(data, matrix, ex::model_config(c, kind));
  write_text(out / "labeling.json", labeling::serialize(data.labeling));
  write_text(out / "preprocess.json", preprocess::serialize(cell.preprocess));
  write_text(out / "model.json", models::to_json(*cell.model).dump() + "\n");
  json mods = json::array();
  for (auto m : c.modalities) mods.push_back(std::string(to_string(m)));
  const json info = {{"window", window}, {"model", std::string(to_string(kind))}, {"modalities", mods}};
  write_text(out / "train_info.json", info.dump(2) + "\n");
  auto m = ex::manifest(data, c, "train");
  m["train"] = info;
  m["preprocess_fingerprint"] = preprocess::fingerprint(cell.preprocess);
  m["model_fingerprint"] = Fnv1a().update(models::to_json(*cell.model).dump()).hex();
  ex::write_manifest(out, m);
  return {{"model", info["model"]},
          {"window", window},
          {"n_train", data.split.train.size()},
          {"n_columns", cell.train_design.names.size()}};
}

json cmd_evaluate(const json& req) {
  check_keys(req, kExperimentKeys, "evaluate");
  const auto from = get_or<std::string>(req, "from", "");
  auto path_of = [&](const char* key, const char* file) {
    if (auto p = get_or<std::string>(req, key, ""); !p.empty()) return fs::path(p);
    if (from.empty()) fail(ErrorKind::Config, std::string("evaluate needs '") + key + "' or 'from'");
    return fs::path(from) / file;
  };
  json info = json::object();
  if (!from.empty() && fs::exists(fs::path(from) / "train_info.json")) info = read_json(fs::path(from) / "train_info.json");
  json effective = req;
  if (!effective.contains("modalities") && info.contains("modalities")) effective["modalities"] = info["modalities"];
  const auto c = experiment_config(effective);
  const double window = get_or(req, "window", get_or(info, "window", 120.0));
  if (!labeling_file(req)) fail(ErrorKind::Config, "evaluate needs fitted labeling artifacts");
  const auto data = prepare(effective, c);
  const auto pre = preprocess::model_from_json(read_json(path_of("preprocess", "preprocess.json")));
  const auto model = models::model_from_json(read_json(path_of("model", "model.json")));
  const auto test = provider(effective, data, c)(window).select_rows(data.split.test);
  const auto design = preprocess::transform(pre, test);
  const models::Vector p = models::predict_proba(*model, design.X, design.names);
  std::vector<int> y;
  for (std::size_t i : data.split.test) y.push_back(data.y[i]);
  const auto rep = eval::evaluate(y, std::vector<double>(p.data(), p.data() + p.size()), c.decision_threshold);
  json result = eval::to_json(rep);
  result["window"] = window;
  result["model"] = std::string(to_string(model->kind()));
  if (req.contains("out")) write_text(out_dir(req) / "metrics.json", result.dump(2) + "\n");
  return result;
}

json cmd_sweep(const json& req) {
  check_keys(req, kExperimentKeys, "sweep");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const auto data = prepare(req, c);
  const auto rows = ex::run_window_sweep(data, c, provider(req, data, c));
  ex::write_sweep_reports(out, rows);
  auto m = ex::manifest(data, c, "sweep");
  json cells = json::array();
  for (const auto& r : rows) cells.push_back(cell_json(r));
  m["cells"] = cells;
  ex::write_manifest(out, m);
  return {{"rows", cells}};
}

json cmd_ablate(const json& req) {
  check_keys(req, kExperimentKeys, "ablate");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const auto data = prepare(req, c);
  const auto rows = ex::run_ablation(data, c, provider(req, data, c));
  ex::write_ablation_report(out, c.ablation_window, rows);
  json list = json::array();
  for (const auto& r : rows) list.push_back({{"excluded", r.excluded}, {"test", eval::to_json(r.test)}});
  auto m = ex::manifest(data, c, "ablate");
  m["rows"] = list;
  ex::write_manifest(out, m);
  return {{"rows", list}};
}

json cmd_importance(const json& req) {
  check_keys(req, kExperimentKeys, "importance");
  const auto c = experiment_config(req);
  const fs::path out = out_dir(req);
  const auto data = prepare(req, c);
  const auto rows = ex::importance_over_time(data, c, provider(req, data, c));
  ex::write_importance_reports(out, rows);
  json list = json::array();
  for (const auto& r : rows) {
    json counts = json::object();
    for (const auto& [mod, n] : r.counts) counts[std::string(to_string(mod))] = n;
    list.push_back({{"window", r.window}, {"counts", counts}});
  }
  auto m = ex::manifest(data, c, "importance");
  m["rows"] = list;
  ex::write_manifest(out, m);
  return {{"rows", list}};
}

}  // namespace

const std::vector<std::string_view>& commands() {
  static const std::vector<std::string_view> names = {"validate", "synth", "collect", "label",  "features",
                                                      "train",    "evaluate", "sweep", "ablate", "importance"};
  return names;
}

ex::ExperimentConfig experiment_config(const json& req) {
  ex::ExperimentConfig c;
  c.windows = number_list(req, "windows", c.windows);
  if (auto names = string_list(req, "models"); !names.empty()) {
    c.models.clear();
    for (const auto& n : names) c.models.push_back(parse_kind(n));
  }
  if (auto it = req.find("hyper"); it != req.end()) {
    if (!it->is_object()) fail(ErrorKind::Config, "option 'hyper' must map model names to objects");
    for (const auto& [name, h] : it->items()) c.hyper[parse_kind(name)] = h;
  }
  c.train_frac = get_or(req, "train_frac", c.train_frac);
  c.cv_folds = get_or(req, "cv_folds", c.cv_folds);
  c.run_cv = get_or(req, "run_cv", c.run_cv);
  c.seed = get_or(req, "seed", c.seed);
  c.jobs = std::max(1u, get_or(req, "jobs", c.jobs));
  c.decision_threshold = get_or(req, "decision_threshold", c.decision_threshold);
  c.labeling.top_frac = get_or(req, "top_frac", c.labeling.top_frac);
  c.labeling.windows = number_list(req, "label_windows", c.labeling.windows);
  c.labeling.forest.n_trees = get_or(req, "label_trees", c.labeling.forest.n_trees);
  const auto weights = get_or<std::string>(req, "weights", "learned");
  if (weights == "published")
    c.labeling.preset = labeling::published_weights();
  else if (weights != "learned")
    fail(ErrorKind::Config, "weights must be learned or published");
  if (auto names = string_list(req, "modalities"); !names.empty()) {
    c.modalities.clear();
    for (const auto& n : names) {
      auto m = modality_from_string(n);
      if (!m) fail(ErrorKind::Config, "unknown modality '" + n + "'");
      c.modalities.insert(*m);
    }
  }
  c.ablation_window = get_or(req, "ablation_window", c.ablation_window);
  c.top_k = get_or(req, "top_k", c.top_k);
  if (auto s = get_or<std::string>(req, "importance", ""); !s.empty()) {
    auto t = models::importance_type_from_string(s);
    if (!t) fail(ErrorKind::Config, "unknown importance type '" + s + "'");
    c.importance = *t;
  }
  if (!(c.train_frac > 0 && c.train_frac < 1)) fail(ErrorKind::Config, "train_frac must lie in (0, 1)");
  if (c.cv_folds < 2) fail(ErrorKind::Config, "cv_folds must be at least 2");
  if (c.top_k < 1) fail(ErrorKind::Config, "top_k must be positive");
  if (!(c.labeling.top_frac > 0 && c.labeling.top_frac < 1)) fail(ErrorKind::Config, "top_frac must lie in (0, 1)");
  return c;
}

json run_command(std::string_view command, const json& request) {
  if (command == "synth") return cmd_synth(request);
  if (command == "validate") return cmd_validate(request);
  if (command == "collect") return cmd_collect(request);
  if (command == "label") return cmd_label(request);
  if (command == "features") return cmd_features(request);
  if (command == "train") return cmd_train(request);
  if (command == "evaluate") return cmd_evaluate(request);
  if (command == "sweep") return cmd_sweep(request);
  if (command == "ablate") return cmd_ablate(request);
  if (command == "importance") return cmd_importance(request);
  fail(ErrorKind::Config, "unknown command '" + std::string(command) + "'");
}

}  // namespace virality::pipeline
