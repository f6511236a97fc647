// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include "virality/catalog.hpp"

#include <algorithm>
#include <array>

namespace virality {

namespace {

using enum ColumnKind;
constexpr Modality C = Modality::Contextual;
constexpr Modality T = Modality::Textual;
constexpr Modality V = Modality::Visual;

constexpr std::array kCatalog{
    // contextual
    StaticField{"is_offensive", C, Numeric},
    StaticField{"offense_type", C, Categorical},
    StaticField{"cultural_reference_type", C, Categorical},
    StaticField{"primary_topic", C, Categorical},
    StaticField{"target_audience", C, Categorical},
    StaticField{"meme_type", C, Categorical},
    StaticField{"analyzed_media_type", C, Categorical},
    StaticField{"title_media_coherence", C, Categorical},
    StaticField{"controversy_score", C, Numeric},
    StaticField{"controversy_type", C, Categorical},
    StaticField{"emotional_resonance", C, Categorical},
    StaticField{"humor_type", C, Categorical},
    StaticField{"insight_commentary_score", C, Numeric},
    StaticField{"novelty_uniqueness_score", C, Numeric},
    StaticField{"profanity_level", C, Categorical},
    StaticField{"relatability_score", C, Numeric},
    StaticField{"format_effort", C, Categorical},
    StaticField{"format_simplicity", C, Numeric},
    StaticField{"format_appeal", C, Numeric},
    StaticField{"format_clarity", C, Numeric},
    StaticField{"social_platform", C, Categorical},
    StaticField{"social_shareability", C, Categorical},
    StaticField{"social_currency", C, Categorical},
    StaticField{"social_trend", C, Categorical},
    // textual
    StaticField{"text_language", T, Categorical},
    StaticField{"text_sentiment_overall", T, Categorical},
    StaticField{"text_word_count", T, Numeric},
    StaticField{"text_image_alignment", T, Categorical},
    StaticField{"text_tone", T, Categorical},
    StaticField{"is_title_present", T, Numeric},
    StaticField{"title_word_count", T, Numeric},
    StaticField{"title_sentiment", T, Categorical},
    // visual
    StaticField{"media_type", V, Categorical},
    StaticField{"image_height", V, Numeric},
    StaticField{"image_width", V, Numeric},
    StaticField{"key_objects_primary", V, Categorical},
    StaticField{"composition", V, Categorical},
    StaticField{"panels", V, Categorical},
    StaticField{"template_is_variant", V, Numeric},
    StaticField{"template_name", V, Categorical},
    StaticField{"facial_expression_is_face", V, Numeric},
    StaticField{"facial_expression_primary_emotion", V, Categorical},
    StaticField{"identified_person_is_celebrity", V, Numeric},
    StaticField{"identified_person_is_character", V, Numeric},
    StaticField{"identified_character_name", V, Categorical},
    StaticField{"identified_person_celebrity_name", V, Categorical},
};

}  // namespace

std::string_view to_string(Modality m) noexcept {
  switch (m) {
    case Modality::Temporal: return "temporal";
    case Modality::Network: return "network";
    case Modality::Visual: return "visual";
    case Modality::Textual: return "textual";
    case Modality::Contextual: return "contextual";
  }
  return "unknown";
}

std::optional<Modality> modality_from_string(std::string_view s) noexcept {
  for (Modality m : kAllModalities)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::string_view to_string(ColumnKind k) noexcept { return k == ColumnKind::Numeric ? "numeric" : "categorical"; }

std::optional<ColumnKind> column_kind_from_string(std::string_view s) noexcept {
  if (s == "numeric") return ColumnKind::Numeric;
  if (s == "categorical") return ColumnKind::Categorical;
  return std::nullopt;
}

std::span<const StaticField> static_catalog() noexcept { return kCatalog; }

const StaticField* find_static_field(std::string_view name) noexcept {
  auto it = std::find_if(kCatalog.begin(), kCatalog.end(), [&](const StaticField& f) { return f.name == name; });
  return it == kCatalog.end() ? nullptr : &*it;
}

}  // namespace virality
