// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

// Command-line front end. Everything goes through the C API: options are
// gathered into a JSON request and handed to vr_run.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "virality/virality.h"

namespace {

using nlohmann::json;

enum class Kind { Str, Num, Int, Bool, NumList, StrList, Json };

struct Slot {
  std::string key;
  Kind kind;
  std::string value;
  std::vector<std::string> values;
  bool flag = false;
  CLI::Option* opt = nullptr;
};

/// Options of one subcommand; only options the user actually set reach the
/// request, so defaults stay in the library.
class Request {
 public:
  explicit Request(CLI::App* app) : app_(app) {}

  void add(const std::string& flags, const std::string& key, Kind kind, const std::string& help) {
    auto& s = slots_.emplace_back(std::make_unique<Slot>());
    s->key = key;
    s->kind = kind;
    switch (kind) {
      case Kind::NumList:
      case Kind::StrList:
        s->opt = app_->add_option(flags, s->values, help)->delimiter(',');
        break;
      case Kind::Bool:
        s->opt = app_->add_flag(flags, s->flag, help);
        break;
      default:
        s->opt = app_->add_option(flags, s->value, help);
    }
  }

  /// Flag that stores `false` under `key` when given.
  void add_negation(const std::string& flags, const std::string& key, const std::string& help) {
    auto& s = slots_.emplace_back(std::make_unique<Slot>());
    s->key = key;
    s->kind = Kind::Bool;
    s->opt = app_->add_flag(flags, s->flag, help);
    negated_.insert(key);
  }

  CLI::App* app() const { return app_; }

  json build() const {
    json j = json::object();
    for (const auto& s : slots_) {
      if (s->opt->count() == 0) continue;
      switch (s->kind) {
        case Kind::Str: j[s->key] = s->value; break;
        case Kind::Num: j[s->key] = std::stod(s->value); break;
        case Kind::Int: j[s->key] = std::stoll(s->value); break;
        case Kind::Bool: j[s->key] = negated_.count(s->key) ? !s->flag : s->flag; break;
        case Kind::NumList: {
          json a = json::array();
          for (const auto& v : s->values) a.push_back(std::stod(v));
          j[s->key] = a;
          break;
        }
        case Kind::StrList: j[s->key] = s->values; break;
        case Kind::Json: j[s->key] = json::parse(s->value); break;
      }
    }
    return j;
  }

 private:
  CLI::App* app_;
  std::vector<std::unique_ptr<Slot>> slots_;
  std::set<std::string> negated_;
};

void dataset_options(Request& r) {
  r.add("--data", "data", Kind::Str, "line-delimited post records");
  r.add("--min-tracking-minutes", "min_tracking_minutes", Kind::Num, "quality filter: minimum tracked age");
  r.add("--max-gap-minutes", "max_gap_minutes", Kind::Num, "quality filter: longest silence between snapshots");
}

void experiment_options(Request& r) {
  dataset_options(r);
  r.add("--from", "from", Kind::Str, "run directory with labeling.json and features/");
  r.add("--labeling", "labeling", Kind::Str, "fitted labeling artifacts");
  r.add_negation("--no-filter", "filter", "skip the quality filters");
  r.add("--train-frac", "train_frac", Kind::Num, "chronological training fraction");
  r.add("--top-frac", "top_frac", Kind::Num, "preliminary positive fraction for weight learning");
  r.add("--label-windows", "label_windows", Kind::NumList, "windows used to learn hybrid weights");
  r.add("--label-trees", "label_trees", Kind::Int, "forest size for weight learning");
  r.add("--weights", "weights", Kind::Str, "learned or published hybrid weights");
}

void model_options(Request& r) {
  r.add("--hyper", "hyper", Kind::Json, "JSON object of hyperparameters keyed by model");
  r.add("--modalities", "modalities", Kind::StrList, "feature modalities to use");
  r.add("--features-dir", "features_dir", Kind::Str, "precomputed feature files");
  r.add("--threshold", "decision_threshold", Kind::Num, "probability cut for F1");
}

int exit_code(vr_status s) {
  if (s == VR_OK) return 0;
  if (s == VR_ERR_CONFIG || s == VR_ERR_INVALID_ARGUMENT) return 1;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early virality prediction pipeline", "virality"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI file; [section] per subcommand, flags override it");

  std::string seed, out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--seed", seed, "global seed");
  app.add_option("--jobs", jobs, "worker threads")->capture_default_str();
  app.add_option("--out", out, "output directory");

  std::vector<std::unique_ptr<Request>> requests;
  auto sub = [&](const char* name, const char* help) -> Request& {
    return *requests.emplace_back(std::make_unique<Request>(app.add_subcommand(name, help)));
  };

  auto& validate = sub("validate", "parse, validate and report quality-filter counts");
  dataset_options(validate);

  auto& synth = sub("synth", "generate a synthetic corpus");
  synth.add("--n", "n_posts", Kind::Int, "number of posts");
  synth.add("--viral-frac", "viral_frac", Kind::Num, "planted positive fraction");
  synth.add("--placement", "placement", Kind::Str, "temporal, network, static or mixed");
  synth.add("--noise-scale", "noise_scale", Kind::Num, "spread multiplier");
  synth.add("--static-missing-rate", "static_missing_rate", Kind::Num, "chance a static field is absent");
  synth.add("--tracking-minutes", "tracking_minutes", Kind::Num, "tracked age of every post");
  synth.add("--min-subscribers", "min_subscribers", Kind::Int, "smallest community");
  synth.add("--max-subscribers", "max_subscribers", Kind::Int, "largest community");

  auto& collect = sub("collect", "poll engagement for a list of posts");
  collect.add("--ids", "ids", Kind::Str, "file with one post_id[,created_utc] per line");
  collect.add("--source", "source", Kind::Str, "replay or http");
  collect.add("--replay", "replay", Kind::Str, "recorded responses for the replay source");
  collect.add("--base-url", "base_url", Kind::Str, "http source endpoint");
  collect.add("--auth-header", "auth_header", Kind::Str, "Authorization header value");
  collect.add("--until-minutes", "until_minutes", Kind::Num, "tracking horizon");
  collect.add("--clock", "clock", Kind::Str, "simulated or system");
  collect.add("--max-retries", "max_retries", Kind::Int, "retries per poll");

  auto& label = sub("label", "fit labeling artifacts on the training split and label every post");
  experiment_options(label);

  auto& features = sub("features", "write per-window feature matrices");
  experiment_options(features);
  features.add("--windows", "windows", Kind::NumList, "observation windows in minutes");

  auto& train = sub("train", "train one model on one window");
  experiment_options(train);
  model_options(train);
  train.add("--window", "window", Kind::Num, "observation window in minutes");
  train.add("--model", "model", Kind::Str, "logreg, gbt, mlp or random_forest");

  auto& evaluate = sub("evaluate", "score a trained model on the test split");
  experiment_options(evaluate);
  model_options(evaluate);
  evaluate.add("--window", "window", Kind::Num, "observation window in minutes");
  evaluate.add("--model", "model", Kind::Str, "model.json path");
  evaluate.add("--preprocess", "preprocess", Kind::Str, "preprocess.json path");

  auto& sweep = sub("sweep", "train and evaluate every (window, model) pair");
  experiment_options(sweep);
  model_options(sweep);
  sweep.add("--windows", "windows", Kind::NumList, "observation windows in minutes");
  sweep.add("--models", "models", Kind::StrList, "model kinds");
  sweep.add("--cv-folds", "cv_folds", Kind::Int, "stratified folds on the training split");
  sweep.add_negation("--no-cv", "run_cv", "skip cross-validation");

  auto& ablate = sub("ablate", "drop one modality at a time (gbt)");
  experiment_options(ablate);
  model_options(ablate);
  ablate.add("--window", "ablation_window", Kind::Num, "observation window in minutes");

  auto& importance = sub("importance", "modality counts among top-k gbt features per window");
  experiment_options(importance);
  model_options(importance);
  importance.add("--windows", "windows", Kind::NumList, "observation windows in minutes");
  importance.add("--top-k", "top_k", Kind::Int, "features counted per window");
  importance.add("--importance", "importance", Kind::Str, "gain, cover or frequency");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  for (const auto& r : requests) {
    if (!r->app()->parsed()) continue;
    const std::string command = r->app()->get_name();
    json req;
    try {
      req = r->build();
    } catch (const std::exception& e) {
      std::cerr << "error: bad option value: " << e.what() << "\n" << r->app()->help();
      return 1;
    }
    if (!seed.empty()) {
      try {
        req["seed"] = std::stoull(seed);
      } catch (const std::exception&) {
        std::cerr << "error: --seed needs a non-negative integer\n";
        return 1;
      }
    }
    if (command == "collect" || (command != "synth" && command != "validate")) req["jobs"] = jobs;
    if (!out.empty()) {
      req["out"] = out;
    } else if (command == "synth") {
      req["out"] = ".";
    } else if (command != "validate" && req.contains("data")) {
      // default run directory: next to the dataset
      req["out"] = std::filesystem::path(req["data"].get<std::string>()).parent_path().string();
      if (req["out"].get<std::string>().empty()) req["out"] = ".";
    }
    if (command == "synth") req.erase("jobs");

    char* result = nullptr;
    const vr_status s = vr_run(command.c_str(), req.dump().c_str(), &result);
    if (s != VR_OK) {
      std::cerr << "error (" << vr_status_name(s) << "): " << vr_last_error() << "\n";
      if (exit_code(s) == 1) std::cerr << r->app()->help();
      return exit_code(s);
    }
    const json summary = json::parse(result);
    vr_string_free(result);
    std::cout << summary.dump(2) << "\n";
    if (command == "validate" && !summary.value("valid", true)) return 2;
    return 0;
  }
  return 1;
}
