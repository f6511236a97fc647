// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace virality {

enum class Modality { Temporal = 0, Network = 1, Visual = 2, Textual = 3, Contextual = 4 };
enum class ColumnKind { Numeric, Categorical };

inline constexpr Modality kAllModalities[] = {Modality::Temporal, Modality::Network, Modality::Visual,
                                              Modality::Textual, Modality::Contextual};

std::string_view to_string(Modality m) noexcept;
std::optional<Modality> modality_from_string(std::string_view s) noexcept;
std::string_view to_string(ColumnKind k) noexcept;
std::optional<ColumnKind> column_kind_from_string(std::string_view s) noexcept;

/// One precomputed content field. Booleans are numeric (0/1); free-text and
/// enumerations are categorical.
struct StaticField {
  std::string_view name;
  Modality modality;
  ColumnKind kind;
};

/// Catalog of content-derived fields accepted in a record's static blob
/// (contextual, textual and visual groups).
std::span<const StaticField> static_catalog() noexcept;

const StaticField* find_static_field(std::string_view name) noexcept;

}  // namespace virality
