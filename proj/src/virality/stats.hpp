// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <span>
#include <vector>

namespace virality::stats {

/// Percentile with linear interpolation between order statistics
/// (h = (n-1) q / 100). `q` is in [0, 100]. Throws Domain on empty input.
double percentile_linear(std::vector<double> values, double q);

/// Median; even counts average the two middle order statistics.
double median(std::vector<double> values);

double mean(std::span<const double> values);

/// Population standard deviation (divides by n).
double population_std(std::span<const double> values);

}  // namespace virality::stats
