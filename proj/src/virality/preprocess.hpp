// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "virality/catalog.hpp"
#include "virality/features.hpp"
#include "virality/models.hpp"

namespace virality::preprocess {

inline constexpr const char* kMissingToken = "missing";

struct ColumnModel {
  std::string name;
  Modality modality = Modality::Temporal;
  ColumnKind kind = ColumnKind::Numeric;
  double median = 0.0, mean = 0.0, std = 1.0;  ///< numeric columns
  std::vector<std::string> vocab;              ///< categorical columns; 'missing' last

  bool operator==(const ColumnModel&) const = default;
};

/// Fit-on-train state: median imputation then standardization for numeric
/// columns, one-hot over the training vocabulary for categorical ones.
struct PreprocessModel {
  std::vector<ColumnModel> columns;
  std::string fitted_on;

  bool operator==(const PreprocessModel&) const = default;
};

/// Output of transform: a dense numeric matrix plus per-column metadata.
struct Design {
  models::Matrix X;
  std::vector<std::string> names;    ///< "col" or "col=value"
  std::vector<std::string> parents;  ///< source feature of each output column
  std::vector<Modality> modalities;
};

/// Throws Fit on zero rows. Missing cells are excluded from the median; mean
/// and population std are taken after imputation; std 0 is stored as 1.
PreprocessModel fit(const features::FeatureMatrix& train);

/// Columns of `m` must be a subset of the fitted columns (Schema otherwise);
/// absent fitted columns are treated as entirely missing.
Design transform(const PreprocessModel& model, const features::FeatureMatrix& m);

std::vector<std::string> output_names(const PreprocessModel& model);

nlohmann::json to_json(const PreprocessModel& model);
PreprocessModel model_from_json(const nlohmann::json& j);
std::string serialize(const PreprocessModel& model);
std::string fingerprint(const PreprocessModel& model);

}  // namespace virality::preprocess
