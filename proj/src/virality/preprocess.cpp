// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "virality/common.hpp"
#include "virality/stats.hpp"

namespace virality::preprocess {

using features::FeatureMatrix;
using features::FeatureValue;
using nlohmann::json;

namespace {

double numeric_cell(const FeatureValue& v, const std::string& column) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  fail(ErrorKind::Schema, "non-numeric value in numeric column '" + column + "'");
}

const std::string* categorical_cell(const FeatureValue& v, const std::string& column) {
  if (features::is_missing(v)) return nullptr;
  if (const std::string* s = std::get_if<std::string>(&v)) return s;
  fail(ErrorKind::Schema, "numeric value in categorical column '" + column + "'");
}

std::string matrix_fingerprint(const FeatureMatrix& m) {
  Fnv1a h;
  h.update(static_cast<std::uint64_t>(m.n_rows()));
  for (const auto& id : m.row_ids) h.update(id);
  for (const auto& c : m.columns) h.update(c.name);
  return std::to_string(m.n_rows()) + "x" + std::to_string(m.n_cols()) + ":" + h.hex();
}

}  // namespace

PreprocessModel fit(const FeatureMatrix& train) {
  train.check_shape();
  if (train.n_rows() == 0) fail(ErrorKind::Fit, "cannot fit preprocessing on zero rows");
  PreprocessModel model;
  model.fitted_on = matrix_fingerprint(train);
  for (std::size_t j = 0; j < train.n_cols(); ++j) {
    const auto& desc = train.columns[j];
    ColumnModel c;
    c.name = desc.name;
    c.modality = desc.modality;
    c.kind = desc.kind;
    if (desc.kind == ColumnKind::Numeric) {
      std::vector<double> observed;
      for (const auto& row : train.rows)
        if (!features::is_missing(row[j])) observed.push_back(numeric_cell(row[j], desc.name));
      for (double v : observed)
        if (!std::isfinite(v)) fail(ErrorKind::Domain, "non-finite value in column '" + desc.name + "'");
      c.median = observed.empty() ? 0.0 : stats::median(observed);
      std::vector<double> imputed;
      imputed.reserve(train.n_rows());
      for (const auto& row : train.rows)
        imputed.push_back(features::is_missing(row[j]) ? c.median : numeric_cell(row[j], desc.name));
      c.mean = stats::mean(imputed);
      const double sd = stats::population_std(imputed);
      c.std = sd > 0 ? sd : 1.0;
    } else {
      std::set<std::string> seen;
      for (const auto& row : train.rows)
        if (const std::string* s = categorical_cell(row[j], desc.name)) seen.insert(*s);
      seen.erase(kMissingToken);
      c.vocab.assign(seen.begin(), seen.end());
      c.vocab.emplace_back(kMissingToken);
    }
    model.columns.push_back(std::move(c));
  }
  return model;
}

std::vector<std::string> output_names(const PreprocessModel& model) {
  std::vector<std::string> out;
  for (const auto& c : model.columns) {
    if (c.kind == ColumnKind::Numeric)
      out.push_back(c.name);
    else
      for (const auto& v : c.vocab) out.push_back(c.name + "=" + v);
  }
  return out;
}

Design transform(const PreprocessModel& model, const FeatureMatrix& m) {
  m.check_shape();
  std::map<std::string, std::size_t, std::less<>> src;
  for (std::size_t j = 0; j < m.n_cols(); ++j) src.emplace(m.columns[j].name, j);
  std::set<std::string, std::less<>> fitted;
  for (const auto& c : model.columns) fitted.insert(c.name);
  for (const auto& c : m.columns)
    if (!fitted.contains(c.name)) fail(ErrorKind::Schema, "column '" + c.name + "' was not seen during fit");

  Design d;
  for (const auto& c : model.columns) {
    if (c.kind == ColumnKind::Numeric) {
      d.names.push_back(c.name);
      d.parents.push_back(c.name);
      d.modalities.push_back(c.modality);
    } else {
      for (const auto& v : c.vocab) {
        d.names.push_back(c.name + "=" + v);
        d.parents.push_back(c.name);
        d.modalities.push_back(c.modality);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(m.n_rows());
  d.X = models::Matrix::Zero(n, static_cast<Eigen::Index>(d.names.size()));
  Eigen::Index out = 0;
  for (const auto& c : model.columns) {
    auto it = src.find(c.name);
    const bool present = it != src.end();
    if (present && m.columns[it->second].kind != c.kind)
      fail(ErrorKind::Schema, "column '" + c.name + "' changed kind since fit");
    if (c.kind == ColumnKind::Numeric) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double v = c.median;
        if (present) {
          const auto& cell = m.rows[static_cast<std::size_t>(i)][it->second];
          if (!features::is_missing(cell)) v = numeric_cell(cell, c.name);
        }
        d.X(i, out) = (v - c.mean) / c.std;
      }
      ++out;
    } else {
      const std::size_t missing_slot = c.vocab.size() - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t slot = missing_slot;
        if (present)
          if (const std::string* s = categorical_cell(m.rows[static_cast<std::size_t>(i)][it->second], c.name)) {
            auto pos = std::lower_bound(c.vocab.begin(), c.vocab.end() - 1, *s);
            if (pos != c.vocab.end() - 1 && *pos == *s) slot = static_cast<std::size_t>(pos - c.vocab.begin());
          }
        d.X(i, out + static_cast<Eigen::Index>(slot)) = 1.0;
      }
      out += static_cast<Eigen::Index>(c.vocab.size());
    }
  }
  return d;
}

json to_json(const PreprocessModel& model) {
  json cols = json::array();
  for (const auto& c : model.columns) {
    json jc = {{"name", c.name},
               {"modality", std::string(to_string(c.modality))},
               {"kind", std::string(to_string(c.kind))}};
    if (c.kind == ColumnKind::Numeric) {
      jc["median"] = c.median;
      jc["mean"] = c.mean;
      jc["std"] = c.std;
    } else {
      jc["vocab"] = c.vocab;
    }
    cols.push_back(std::move(jc));
  }
  return {{"format_version", 1}, {"fitted_on", model.fitted_on}, {"columns", std::move(cols)}};
}

PreprocessModel model_from_json(const json& j) {
  PreprocessModel model;
  try {
    if (j.at("format_version").get<int>() != 1) fail(ErrorKind::Parse, "unsupported preprocess model version");
    model.fitted_on = j.at("fitted_on").get<std::string>();
    for (const auto& jc : j.at("columns")) {
      ColumnModel c;
      c.name = jc.at("name").get<std::string>();
      const auto mod = modality_from_string(jc.at("modality").get<std::string>());
      const auto kind = column_kind_from_string(jc.at("kind").get<std::string>());
      if (!mod || !kind) fail(ErrorKind::Parse, "bad modality or kind for column '" + c.name + "'");
      c.modality = *mod;
      c.kind = *kind;
      if (c.kind == ColumnKind::Numeric) {
        c.median = jc.at("median").get<double>();
        c.mean = jc.at("mean").get<double>();
        c.std = jc.at("std").get<double>();
      } else {
        c.vocab = jc.at("vocab").get<std::vector<std::string>>();
        if (c.vocab.empty() || c.vocab.back() != kMissingToken)
          fail(ErrorKind::Parse, "vocabulary of '" + c.name + "' must end with 'missing'");
      }
      model.columns.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed preprocess model: ") + e.what());
  }
  return model;
}

std::string serialize(const PreprocessModel& model) { return to_json(model).dump(2) + "\n"; }

std::string fingerprint(const PreprocessModel& model) { return Fnv1a().update(serialize(model)).hex(); }

}  // namespace virality::preprocess
