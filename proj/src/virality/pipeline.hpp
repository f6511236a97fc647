// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <string_view>
#include <vector>

#include <json.hpp>

#include "virality/experiments.hpp"

namespace virality::pipeline {

/// Subcommands understood by run_command, in CLI order.
const std::vector<std::string_view>& commands();

/// Runs one pipeline step described by a JSON request and returns a JSON
/// summary. Output files go under request["out"]. Unknown commands and
/// unknown request keys raise Config.
nlohmann::json run_command(std::string_view command, const nlohmann::json& request);

/// Experiment settings from a request (keys shared by label/features/train/
/// sweep/ablate/importance).
experiments::ExperimentConfig experiment_config(const nlohmann::json& request);

}  // namespace virality::pipeline
