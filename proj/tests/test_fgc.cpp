// Copyright (c) the grainkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <grainkit/fgc.hpp>
#include <grainkit/plot.hpp>
#include <grainkit/rng.hpp>
#include <grainkit/sampler.hpp>

#include "testutil.hpp"

using namespace grainkit;

namespace {

FilmGrainParams simple_params() {
  FilmGrainParams p;
  p.log2_scale_factor = 4;
  ComponentModel luma;
  luma.intervals.push_back({0, 255, 100, 8, 8});
  p.components[0] = luma;
  return p;
}

}  // namespace

TEST_CASE("validate accepts a minimal single-interval parameter set") {
  const auto report = validate(simple_params());
  CHECK(report.ok());
  CHECK(report.violations.empty());
}

TEST_CASE("validate flags lower > upper") {
  auto p = simple_params();
  p.components[0]->intervals[0] = {200, 100, 50, 8, 8};
  const auto report = validate(p);
  CHECK_FALSE(report.ok());
  REQUIRE_FALSE(report.violations.empty());
  CHECK(report.violations[0].rule == "lower-le-upper");
}

TEST_CASE("validate flags every out-of-range field") {
  auto p = simple_params();
  p.model_id = 1;
  p.blending_mode_id = 2;
  p.log2_scale_factor = 9;
  p.components[0]->intervals[0].cutoff_h = 15;
  p.components[0]->intervals[0].cutoff_v = 1;
  const auto report = validate(p);
  CHECK(report.violations.size() == 5);
}

TEST_CASE("validate flags overlapping and unsorted intervals") {
  auto p = simple_params();
  p.components[0]->intervals = {{0, 120, 50, 8, 8}, {100, 255, 60, 8, 8}};
  CHECK_FALSE(validate(p).ok());
  p.components[0]->intervals = {{130, 255, 50, 8, 8}, {0, 120, 60, 8, 8}};
  CHECK_FALSE(validate(p).ok());
}

TEST_CASE("validate accepts all sampler output") {
  Rng rng(99);
  SamplerConstraints constraints;
  for (int i = 0; i < 1000; ++i) {
    const auto params = sample_params(rng, constraints);
    CHECK(validate(params).ok());
  }
}

TEST_CASE("binary round-trip is identity for a minimal set") {
  const auto p = simple_params();
  const auto bytes = encode_binary(p);
  const auto decoded = decode_binary(bytes);
  CHECK(decoded == p);
  CHECK(encode_binary(decoded) == bytes);
}

TEST_CASE("binary round-trip holds for fuzzed valid parameter sets") {
  Rng rng(7);
  SamplerConstraints constraints;
  for (int i = 0; i < 300; ++i) {
    const auto params = sample_params(rng, constraints);
    const auto bytes = encode_binary(params);
    CHECK(decode_binary(bytes) == params);
  }
}

TEST_CASE("binary decode diagnostics are distinct per failure") {
  const auto bytes = encode_binary(simple_params());

  SUBCASE("bad magic") {
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(decode_binary(bad), doctest::Contains("magic"),
                         CodecError);
    try {
      decode_binary(bad);
    } catch (const CodecError& e) {
      CHECK(e.kind() == CodecError::Kind::kBadMagic);
    }
  }
  SUBCASE("unsupported version") {
    auto bad = bytes;
    bad[4] = 9;
    try {
      decode_binary(bad);
      FAIL("expected CodecError");
    } catch (const CodecError& e) {
      CHECK(e.kind() == CodecError::Kind::kUnsupportedVersion);
    }
  }
  SUBCASE("truncated mid-interval") {
    auto bad = bytes;
    bad.resize(bytes.size() - 2);
    try {
      decode_binary(bad);
      FAIL("expected CodecError");
    } catch (const CodecError& e) {
      CHECK(e.kind() == CodecError::Kind::kTruncated);
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
  }
  SUBCASE("out-of-range field") {
    auto bad = bytes;
    bad[7] = 1;  // log2_scale_factor below 2
    try {
      decode_binary(bad);
      FAIL("expected CodecError");
    } catch (const CodecError& e) {
      CHECK(e.kind() == CodecError::Kind::kOutOfRange);
    }
  }
  SUBCASE("trailing data") {
    auto bad = bytes;
    bad.push_back(0);
    try {
      decode_binary(bad);
      FAIL("expected CodecError");
    } catch (const CodecError& e) {
      CHECK(e.kind() == CodecError::Kind::kTrailingData);
    }
  }
}

TEST_CASE("encode refuses invalid parameters") {
  auto p = simple_params();
  p.log2_scale_factor = 1;
  CHECK_THROWS_AS(encode_binary(p), CodecError);
  CHECK_THROWS_AS(encode_text(p), CodecError);
}

TEST_CASE("text round-trip is identity on canonical text") {
  Rng rng(21);
  SamplerConstraints constraints;
  for (int i = 0; i < 50; ++i) {
    const auto params = sample_params(rng, constraints);
    const std::string text = encode_text(params);
    const auto decoded = decode_text(text);
    CHECK(decoded == params);
    CHECK(encode_text(decoded) == text);
  }
}

TEST_CASE("text decode accepts comments and reordered keys") {
  const std::string text =
      "# hand-written\n"
      "SEIFGCLog2ScaleFactor: 4   # trailing comment\n"
      "SEIFGCModelID: 0\n"
      "SEIFGCBlendingModeID: 0\n"
      "SEIFGCCompModelPresentComp2: 0\n"
      "SEIFGCCompModelPresentComp1: 0\n"
      "SEIFGCCompModelPresentComp0: 1\n"
      "SEIFGCNumIntensityIntervalMinus1Comp0: 0\n"
      "SEIFGCNumModelValuesMinus1Comp0: 2\n"
      "SEIFGCIntensityIntervalLowerBoundComp0Interval0: 0\n"
      "SEIFGCIntensityIntervalUpperBoundComp0Interval0: 255\n"
      "SEIFGCCompModelValueComp0Interval0Value0: 100\n"
      "SEIFGCCompModelValueComp0Interval0Value1: 8\n"
      "SEIFGCCompModelValueComp0Interval0Value2: 8\n";
  CHECK(decode_text(text) == simple_params());
}

TEST_CASE("text range error names the field and its bounds") {
  std::string text = encode_text(simple_params());
  const std::string from = "SEIFGCLog2ScaleFactor: 4";
  text.replace(text.find(from), from.size(), "SEIFGCLog2ScaleFactor: 9");
  try {
    decode_text(text);
    FAIL("expected TextError");
  } catch (const TextError& e) {
    const std::string what = e.what();
    CHECK(what.find("SEIFGCLog2ScaleFactor") != std::string::npos);
    CHECK(what.find("[2,7]") != std::string::npos);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("text decode rejects unknown keys with a line number") {
  std::string text = encode_text(simple_params());
  text += "SEIFGCBogusKey: 3\n";
  try {
    decode_text(text);
    FAIL("expected TextError");
  } catch (const TextError& e) {
    CHECK(std::string(e.what()).find("SEIFGCBogusKey") != std::string::npos);
    CHECK(e.line() == 15);
  }
}

TEST_CASE("text decode reports syntax errors with line and column") {
  CHECK_THROWS_AS(decode_text("SEIFGCModelID 0\n"), TextError);
  CHECK_THROWS_AS(decode_text("SEIFGCModelID: zero\n"), TextError);
  CHECK_THROWS_AS(decode_text("SEIFGCModelID: 0\nSEIFGCModelID: 0\n"),
                  TextError);
}

TEST_CASE("save/load round-trips both formats") {
  testutil::TempDir dir("fgc");
  const auto p = simple_params();
  save_params(p, dir.file("p.fgcs"));
  CHECK(load_params(dir.file("p.fgcs")) == p);
  save_params(p, dir.file("p.txt"));
  CHECK(load_params(dir.file("p.txt")) == p);
}

namespace {

int count_occurrences(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("plot draws one dashed separator per interval") {
  Rng rng(3);
  SamplerConstraints constraints;
  const auto params = sample_params(rng, constraints);  // 16 luma intervals
  const std::string svg = render_params_svg(params, 0);
  CHECK(count_occurrences(svg, "class=\"sep\"") == 16);
  CHECK(svg.find("Gain(x*2^-") != std::string::npos);
  CHECK(svg.find("stroke=\"blue\"") != std::string::npos);
  CHECK(svg.find("stroke=\"green\"") != std::string::npos);
}

TEST_CASE("single full-range interval has no interior separator") {
  const std::string svg = render_params_svg(simple_params(), 0);
  // The only separator sits on the right frame edge, not inside the axes.
  const size_t pos = svg.find("class=\"sep\" x1=\"");
  REQUIRE(pos != std::string::npos);
  const double x = std::stod(svg.substr(pos + 16));
  CHECK(x == doctest::Approx(640.0 - 64.0));  // plot frame right edge
  CHECK(count_occurrences(svg, "class=\"sep\"") == 1);
}

TEST_CASE("table has one row per interval") {
  Rng rng(5);
  SamplerConstraints constraints;
  const auto params = sample_params(rng, constraints);
  const std::string table = render_params_table(params, 1);  // Cb: 6 intervals
  CHECK(count_occurrences(table, "\n") == 1 + 6);             // header + rows
}

TEST_CASE("plot of an absent component fails") {
  CHECK_THROWS(render_params_svg(simple_params(), 1));
}
