// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 virality-cpp contributors

#include <doctest.h>

#include <set>
#include <sstream>

#include "support/mock_static.hpp"
#include "virality/common.hpp"
#include "virality/ingest.hpp"
#include "virality/synth.hpp"

using namespace virality;
using virality::testing::make_record;
using virality::testing::mock_static_features;

TEST_CASE("empty input yields nothing") {
  std::istringstream in("");
  const auto r = parse_dataset(in);
  CHECK(r.records.empty());
  CHECK(r.diagnostics.empty());
}

TEST_CASE("malformed line is reported with its line number") {
  std::ostringstream text;
  text << serialize_record(make_record("a", {0, 5, 1440})) << "\n" << "{\"post_id\": 3}\n";
  std::istringstream in(text.str());
  const auto r = parse_dataset(in);
  REQUIRE(r.records.size() == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].line == 2);
}

TEST_CASE("blank lines are skipped but still counted") {
  std::istringstream in("\n\nnot json\n");
  const auto r = parse_dataset(in);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].line == 3);
}

TEST_CASE("missing file is an io error") {
  try {
    parse_dataset(std::filesystem::path("/nonexistent/posts.jsonl"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("serialize then parse gives the same record") {
  synth::SynthConfig c;
  c.n_posts = 40;
  c.seed = 3;
  for (auto r : synth::generate(c).records) {
    r.static_features = mock_static_features(r);
    std::istringstream in(serialize_record(r) + "\n");
    const auto back = parse_dataset(in);
    REQUIRE(back.records.size() == 1);
    CHECK(back.records[0] == r);
  }
}

TEST_CASE("parsing is deterministic") {
  synth::SynthConfig c;
  c.n_posts = 30;
  std::ostringstream text;
  for (const auto& r : synth::generate(c).records) text << serialize_record(r) << "\n";
  std::istringstream a(text.str()), b(text.str());
  CHECK(parse_dataset(a).records == parse_dataset(b).records);
}

TEST_CASE("iso timestamps") {
  CHECK(parse_iso8601_utc("2024-01-01T00:00:00Z") == 1704067200);
  CHECK(parse_iso8601_utc("2024-01-01T00:00:00+00:00") == 1704067200);
  CHECK(parse_iso8601_utc("2024-02-29T12:30:15.250Z") == 1709209815);
  CHECK(format_iso8601_utc(1709209815) == "2024-02-29T12:30:15Z");
  CHECK_THROWS_AS(parse_iso8601_utc("2024-01-01 00:00:00"), Error);
  CHECK_THROWS_AS(parse_iso8601_utc("2024-13-01T00:00:00Z"), Error);
}

TEST_CASE("unknown enum values are parse errors") {
  auto j = to_json(make_record("a", {0, 1440}));
  j["media_type"] = "hologram";
  CHECK_THROWS_AS(record_from_json(j), Error);
}

TEST_CASE("validation: non-increasing time reports the first offending index") {
  auto r = make_record("a", {0, 5, 5});
  const auto rep = validate_record(r);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].code == ViolationCode::NonIncreasingTime);
  CHECK(rep[0].message == "non-increasing time at index 2");

  r = make_record("b", {0, 5, 3, 2});
  const auto rep2 = validate_record(r);
  REQUIRE(rep2.size() == 1);
  CHECK(rep2[0].index == 2);
}

TEST_CASE("validation: subscribers below one") {
  auto r = make_record("a", {0, 5});
  r.subreddit.subscribers = 0;
  const auto rep = validate_record(r);
  REQUIRE(rep.size() == 1);
  CHECK(rep[0].message == "subscribers < 1");
}

TEST_CASE("validation: other invariants") {
  auto r = make_record("a", {0, 5});
  r.snapshots[1].comments = -1;
  r.snapshots[0].upvote_ratio = 1.5;
  r.static_features = StaticBlob{{"no_such_field", 1.0}, {"template_name", 3.0}};
  std::set<ViolationCode> codes;
  for (const auto& v : validate_record(r)) codes.insert(v.code);
  CHECK(codes.count(ViolationCode::NegativeComments));
  CHECK(codes.count(ViolationCode::UpvoteRatioOutOfRange));
  CHECK(codes.count(ViolationCode::UnknownStaticField));
  CHECK(codes.count(ViolationCode::StaticFieldType));
}

TEST_CASE("validation: generated records are clean") {
  synth::SynthConfig c;
  c.n_posts = 200;
  c.placement = synth::SignalPlacement::Mixed;
  for (const auto& r : synth::generate(c).records) CHECK(validate_record(r).empty());
}

TEST_CASE("validation: duplicate ids") {
  const std::vector<PostRecord> rs = {make_record("a", {0, 1}), make_record("a", {0, 2})};
  const auto rep = validate_dataset(rs);
  REQUIRE(rep.count("a"));
  CHECK(rep.at("a").back().code == ViolationCode::DuplicatePostId);
}

TEST_CASE("filters: tracking boundary is inclusive at 1440") {
  auto shortr = make_record("short", {0, 60, 300, 600, 900, 1200, 1439.9});
  auto ok = make_record("ok", {0, 60, 300, 600, 900, 1200, 1500});
  CHECK(filter_reason(shortr) == FilterReason::ShortTracking);
  CHECK_FALSE(filter_reason(ok).has_value());
  auto exact = make_record("exact", {0, 300, 600, 900, 1200, 1440});
  CHECK_FALSE(filter_reason(exact).has_value());
}

TEST_CASE("filters: planted violation counts are reproduced exactly") {
  std::vector<PostRecord> rs;
  int k = 0;
  auto grid = [] { return std::vector<double>{0, 300, 600, 900, 1200, 1440}; };
  for (int i = 0; i < 7; ++i) rs.push_back(make_record("ok" + std::to_string(k++), grid()));
  for (int i = 0; i < 3; ++i) {
    auto r = make_record("rm" + std::to_string(k++), grid());
    r.removed = true;
    rs.push_back(r);
  }
  for (int i = 0; i < 2; ++i) {
    auto r = make_record("nomedia" + std::to_string(k++), grid());
    r.media_url.clear();
    rs.push_back(r);
  }
  for (int i = 0; i < 4; ++i) rs.push_back(make_record("short" + std::to_string(k++), {0, 300, 600}));
  for (int i = 0; i < 5; ++i) rs.push_back(make_record("gap" + std::to_string(k++), {0, 10, 500, 900, 1200, 1440}));
  rs.push_back(make_record("empty" + std::to_string(k++), {}));

  FilterSummary s;
  const auto kept = apply_quality_filters(rs, {}, &s);
  CHECK(s.raw == 22);
  CHECK(s.removed == 3);
  CHECK(s.no_media == 2);
  CHECK(s.short_tracking == 4);
  CHECK(s.tracking_gap == 5);
  CHECK(s.no_snapshots == 1);
  CHECK(s.kept == 7);
  CHECK(kept.size() == 7);
}

TEST_CASE("filters are idempotent") {
  synth::SynthConfig c;
  c.n_posts = 100;
  auto rs = synth::generate(c).records;
  rs[3].snapshots.resize(5);
  rs[7].removed = true;
  const auto once = apply_quality_filters(rs);
  const auto twice = apply_quality_filters(once);
  CHECK(once == twice);
  CHECK(once.size() == 98);
}

TEST_CASE("dataset fingerprint ignores order but not content") {
  synth::SynthConfig c;
  c.n_posts = 20;
  auto rs = synth::generate(c).records;
  const auto a = dataset_fingerprint(rs);
  std::reverse(rs.begin(), rs.end());
  CHECK(dataset_fingerprint(rs) == a);
  rs.pop_back();
  CHECK(dataset_fingerprint(rs) != a);
}
