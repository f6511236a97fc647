// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include "virality/ingest.hpp"

namespace virality::testing {

/// Stand-in for the content-analysis step: fills every catalog field from a
/// hash of the post id and title. Same record in, same blob out.
StaticBlob mock_static_features(const PostRecord& r);

/// Small valid record with snapshots at the given times (score = 10 * t).
PostRecord make_record(const std::string& id, std::vector<double> times, std::int64_t created_utc = 1704067200);

}  // namespace virality::testing
