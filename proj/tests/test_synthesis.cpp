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

#include <grainkit/rng.hpp>
#include <grainkit/synthesis.hpp>

#include "testutil.hpp"

using namespace grainkit;

namespace {

FilmGrainParams luma_only(int scale, int cutoff, int log2) {
  FilmGrainParams p;
  p.log2_scale_factor = static_cast<std::uint8_t>(log2);
  ComponentModel luma;
  luma.intervals.push_back({0, 255, static_cast<std::uint8_t>(scale),
                            static_cast<std::uint8_t>(cutoff),
                            static_cast<std::uint8_t>(cutoff)});
  p.components[0] = luma;
  return p;
}

struct ResidualStats {
  double mean;
  double std;
};

ResidualStats residual_stats(const Plane& grainy, const Plane& clean) {
  double sum = 0.0, sum2 = 0.0;
  const auto n = static_cast<double>(grainy.size());
  for (int r = 0; r < grainy.rows(); ++r) {
    for (int c = 0; c < grainy.cols(); ++c) {
      const double d = double(grainy(r, c)) - double(clean(r, c));
      sum += d;
      sum2 += d * d;
    }
  }
  const double mean = sum / n;
  return {mean, std::sqrt(sum2 / n - mean * mean)};
}

}  // namespace

TEST_CASE("pattern generation is deterministic") {
  const auto a = generate_pattern(8, 8, 42);
  const auto b = generate_pattern(8, 8, 42);
  CHECK(a.values == b.values);
  const auto c = generate_pattern(8, 8, 43);
  CHECK(a.values != c.values);
  const auto d = generate_pattern(8, 9, 42);
  CHECK(a.values != d.values);
}

TEST_CASE("pattern is zero-mean unit-variance") {
  for (const auto [h, v] : {std::pair{2, 2}, {8, 5}, {14, 14}}) {
    const auto pattern = generate_pattern(h, v, 7);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < kPatternSize; ++r) {
      for (int c = 0; c < kPatternSize; ++c) {
        sum += pattern.values(r, c);
        sum2 += double(pattern.values(r, c)) * pattern.values(r, c);
      }
    }
    const double n = kPatternSize * kPatternSize;
    CHECK(std::abs(sum / n) < 1e-6);
    CHECK(std::abs(sum2 / n - (sum / n) * (sum / n) - 1.0) < 1e-6);
  }
}

TEST_CASE("pattern spectrum is confined to the 4x cutoff mask") {
  // Oracle: independent direct-summation DCT of the generated pattern.
  for (const auto [h, v] : {std::pair{2, 2}, {3, 7}, {14, 2}}) {
    const auto pattern = generate_pattern(h, v, 11);
    const Eigen::MatrixXd coeff =
        testutil::reference_dct2(pattern.values.cast<double>());
    double in_mask = 0.0, out_mask = 0.0;
    for (int r = 0; r < kPatternSize; ++r) {
      for (int c = 0; c < kPatternSize; ++c) {
        const double e = coeff(r, c) * coeff(r, c);
        if (r < 4 * v && c < 4 * h) {
          in_mask += e;
        } else {
          out_mask += e;
        }
      }
    }
    CHECK(out_mask / (in_mask + out_mask) < 1e-9);
    CHECK(std::abs(coeff(0, 0)) < 1e-6);  // DC removed
  }
}

TEST_CASE("cutoff out of range is rejected") {
  CHECK_THROWS_AS(generate_pattern(1, 8, 0), std::out_of_range);
  CHECK_THROWS_AS(generate_pattern(8, 15, 0), std::out_of_range);
}

TEST_CASE("pattern database holds one pattern per distinct cutoff pair") {
  auto p = luma_only(100, 8, 4);
  const auto db1 = build_pattern_db(p, 5);
  CHECK(db1.size() == 1);

  // 16 intervals stepping through cutoffs 3..14 twice over: 12 distinct.
  ComponentModel luma;
  for (int i = 0; i < 16; ++i) {
    const int cut = 3 + i % 12;
    luma.intervals.push_back(
        {static_cast<std::uint8_t>(16 * i),
         static_cast<std::uint8_t>(16 * i + 15), 100,
         static_cast<std::uint8_t>(cut), static_cast<std::uint8_t>(cut)});
  }
  p.components[0] = luma;
  const auto db2 = build_pattern_db(p, 5);
  CHECK(db2.size() == 12);
  CHECK(db2.contains(3, 3));
  CHECK_FALSE(db2.contains(3, 4));
  CHECK_THROWS_WITH_AS(db2.at(3, 4), doctest::Contains("no grain pattern"),
                       std::out_of_range);
}

TEST_CASE("select_interval picks the containing interval") {
  ComponentModel model;
  model.intervals = {{0, 99, 10, 8, 8}, {100, 255, 20, 9, 9}};
  auto iv = select_interval(model, 120);
  REQUIRE(iv.has_value());
  CHECK(iv->scaling_factor == 20);
  iv = select_interval(model, 99);  // inclusive upper bound
  REQUIRE(iv.has_value());
  CHECK(iv->scaling_factor == 10);
  model.intervals = {{0, 50, 10, 8, 8}};
  CHECK_FALSE(select_interval(model, 200).has_value());
}

TEST_CASE("zero scaling factor leaves the plane untouched") {
  const Plane clean = Plane::Constant(64, 64, 128);
  const auto params = luma_only(0, 8, 4);
  const auto db = build_pattern_db(params, 3);
  SynthesisConfig cfg;
  cfg.seed = 3;
  const Plane out = synthesize_plane(clean, *params.components[0], 4, db, cfg, 0);
  CHECK(out == clean);
}

TEST_CASE("flat-plane residual statistics follow the gain law") {
  // Oracle: direct residual measurement. Expected std is s * 2^-L because
  // patterns are unit variance; deblocking is disabled to isolate the law.
  const Plane clean = Plane::Constant(512, 512, 128);
  const auto params = luma_only(100, 8, 4);
  const auto db = build_pattern_db(params, 17);
  SynthesisConfig cfg;
  cfg.seed = 17;
  cfg.deblock = false;
  const Plane out =
      synthesize_plane(clean, *params.components[0], 4, db, cfg, 0);
  const auto stats = residual_stats(out, clean);
  CHECK(std::abs(stats.mean) < 0.5);
  CHECK(stats.std == doctest::Approx(6.25).epsilon(0.10));
}

TEST_CASE("same seed gives identical output, different seeds same strength") {
  const Plane clean = Plane::Constant(256, 256, 100);
  const auto params = luma_only(120, 6, 4);
  const auto db = build_pattern_db(params, 9);
  SynthesisConfig cfg;
  cfg.seed = 9;
  const Plane a = synthesize_plane(clean, *params.components[0], 4, db, cfg, 0);
  const Plane b = synthesize_plane(clean, *params.components[0], 4, db, cfg, 0);
  CHECK(a == b);

  const auto db2 = build_pattern_db(params, 10);
  SynthesisConfig cfg2 = cfg;
  cfg2.seed = 10;
  const Plane c =
      synthesize_plane(clean, *params.components[0], 4, db2, cfg2, 0);
  CHECK(a != c);
  const double std_a = residual_stats(a, clean).std;
  const double std_c = residual_stats(c, clean).std;
  CHECK(std_c == doctest::Approx(std_a).epsilon(0.05));
}

TEST_CASE("threaded synthesis matches single-threaded exactly") {
  Rng rng(404);
  Plane clean(200, 312);
  for (int r = 0; r < clean.rows(); ++r) {
    for (int c = 0; c < clean.cols(); ++c) {
      clean(r, c) = static_cast<std::uint8_t>(rng.next_below(256));
    }
  }
  ComponentModel model;
  model.intervals = {{0, 127, 80, 4, 4}, {128, 255, 120, 10, 10}};
  FilmGrainParams params;
  params.components[0] = model;
  const auto db = build_pattern_db(params, 55);
  SynthesisConfig single;
  single.seed = 55;
  SynthesisConfig quad = single;
  quad.threads = 4;
  const Plane a = synthesize_plane(clean, model, 4, db, single, 0);
  const Plane b = synthesize_plane(clean, model, 4, db, quad, 0);
  CHECK(a == b);
}

TEST_CASE("luma-only parameters leave chroma untouched") {
  Frame clean;
  clean.y = Plane::Constant(64, 64, 128);
  clean.cb = Plane::Constant(32, 32, 110);
  clean.cr = Plane::Constant(32, 32, 140);
  const Frame out = synthesize_frame(clean, luma_only(100, 8, 4), 21);
  CHECK(out.cb == clean.cb);
  CHECK(out.cr == clean.cr);
  CHECK(out.y != clean.y);
}

TEST_CASE("deblock averages grain across block boundaries") {
  const Plane clean = Plane::Constant(64, 64, 128);
  const auto params = luma_only(200, 14, 3);
  const auto db = build_pattern_db(params, 33);
  SynthesisConfig with;
  with.seed = 33;
  with.deblock = true;
  SynthesisConfig without = with;
  without.deblock = false;
  const Plane a = synthesize_plane(clean, *params.components[0], 3, db, with, 0);
  const Plane b =
      synthesize_plane(clean, *params.components[0], 3, db, without, 0);
  CHECK(a != b);
  // Only boundary rows/columns may differ.
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const int rm = r % 8, cm = c % 8;
      const bool boundary = rm == 0 || rm == 7 || cm == 0 || cm == 7;
      if (!boundary) CHECK(a(r, c) == b(r, c));
    }
  }
}

TEST_CASE("partial edge blocks are synthesized") {
  const Plane clean = Plane::Constant(50, 70, 90);
  const auto params = luma_only(150, 5, 3);
  const auto db = build_pattern_db(params, 2);
  SynthesisConfig cfg;
  cfg.seed = 2;
  const Plane out = synthesize_plane(clean, *params.components[0], 3, db, cfg, 0);
  CHECK(out.rows() == 50);
  CHECK(out.cols() == 70);
  const auto stats = residual_stats(out, clean);
  CHECK(stats.std > 1.0);  // grain reached the plane
}
