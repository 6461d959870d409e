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

#include <fstream>
#include <grainkit/dataset.hpp>
#include <grainkit/sampler.hpp>
#include <grainkit/synthesis.hpp>
#include <set>

#include "testutil.hpp"

using namespace grainkit;

namespace {

void check_component(const ComponentModel& model, int n,
                     const SamplerConstraints& k, bool is_luma) {
  REQUIRE(model.intervals.size() == static_cast<size_t>(n));
  CHECK(model.intervals.front().lower == 0);
  CHECK(model.intervals.back().upper == 255);
  const int cut_lo = is_luma ? k.luma_cutoff_min : k.chroma_cutoff_min;
  const int cut_hi = is_luma ? k.luma_cutoff_max : k.chroma_cutoff_max;
  for (size_t i = 0; i < model.intervals.size(); ++i) {
    const auto& iv = model.intervals[i];
    CHECK(iv.scaling_factor % k.scale_step == 0);
    CHECK(iv.scaling_factor >= k.scale_min);
    CHECK(iv.scaling_factor <= k.scale_max);
    CHECK(iv.cutoff_h == iv.cutoff_v);
    CHECK(iv.cutoff_h >= cut_lo);
    CHECK(iv.cutoff_h <= cut_hi);
    if (i > 0) {
      const auto& prev = model.intervals[i - 1];
      CHECK(int(prev.upper) + 1 == int(iv.lower));  // contiguous partition
      CHECK(std::abs(int(iv.scaling_factor) - int(prev.scaling_factor)) <=
            k.max_scale_delta);
      CHECK(std::abs(int(iv.cutoff_h) - int(prev.cutoff_h)) <=
            k.max_cutoff_delta);
    }
  }
}

}  // namespace

TEST_CASE("sampled luma component partitions [0,255] under all constraints") {
  Rng rng(1);
  SamplerConstraints k;
  for (int i = 0; i < 2000; ++i) {
    check_component(sample_component(rng, 16, k, true), 16, k, true);
  }
}

TEST_CASE("sampled chroma component honours the chroma cutoff range") {
  Rng rng(2);
  SamplerConstraints k;
  for (int i = 0; i < 2000; ++i) {
    check_component(sample_component(rng, 6, k, false), 6, k, false);
  }
}

TEST_CASE("single-interval sampling works") {
  Rng rng(3);
  SamplerConstraints k;
  const auto model = sample_component(rng, 1, k, true);
  check_component(model, 1, k, true);
}

TEST_CASE("sample_params yields valid, distinct parameter sets") {
  Rng rng(4);
  SamplerConstraints k;
  std::set<std::vector<std::uint8_t>> seen;
  for (int i = 0; i < 300; ++i) {
    const auto params = sample_params(rng, k);
    CHECK(validate(params).ok());
    CHECK(k.log2_choices.count(params.log2_scale_factor) == 1);
    REQUIRE(params.components[0].has_value());
    REQUIRE(params.components[1].has_value());
    REQUIRE(params.components[2].has_value());
    CHECK(params.components[0]->intervals.size() == 16);
    CHECK(params.components[1]->intervals.size() == 6);
    CHECK(params.components[2]->intervals.size() == 6);
    seen.insert(encode_binary(params));
  }
  CHECK(seen.size() == 300);
}

TEST_CASE("delta-zero constraints produce constant scale and cutoff") {
  Rng rng(5);
  SamplerConstraints k;
  k.max_scale_delta = 0;
  k.max_cutoff_delta = 0;
  k.scale_min = 50;
  const auto model = sample_component(rng, 16, k, true);
  for (const auto& iv : model.intervals) {
    CHECK(iv.scaling_factor == model.intervals[0].scaling_factor);
    CHECK(iv.cutoff_h == model.intervals[0].cutoff_h);
  }
}

TEST_CASE("build_dataset produces the expected entry count and layout") {
  testutil::TempDir clean("ds_clean");
  testutil::TempDir out("ds_out");
  for (int i = 0; i < 4; ++i) {
    write_pgm(clean.file("img" + std::to_string(i) + ".pgm"),
              generate_clean_plane(96, 96, 1000 + i));
  }
  DatasetOptions options;
  options.n_param_sets = 5;
  options.crops_per_image = 3;
  options.crop_size = 64;
  options.seed = 77;
  const auto manifest = build_dataset(clean.str(), out.str(), options);
  CHECK(manifest.entries.size() == 12);
  for (const auto& e : manifest.entries) {
    CHECK(std::filesystem::exists(out.path() / e.grainy_path));
    CHECK(std::filesystem::exists(out.path() / e.params_path));
    CHECK(e.crop_x % 2 == 0);
    CHECK(e.crop_y % 2 == 0);
    CHECK(e.crop_x + e.crop_w <= 96);
    CHECK(e.crop_y + e.crop_h <= 96);
  }
  const auto loaded = read_manifest((out.path() / "manifest.tsv").string());
  CHECK(loaded.entries.size() == 12);
  CHECK(loaded.sampler_seed == 77);
  CHECK(loaded.entries[3].seed == manifest.entries[3].seed);
  CHECK(loaded.entries[3].grainy_path == manifest.entries[3].grainy_path);
}

TEST_CASE("build_dataset is reproducible byte for byte") {
  testutil::TempDir clean("ds_rep_clean");
  testutil::TempDir out1("ds_rep1");
  testutil::TempDir out2("ds_rep2");
  for (int i = 0; i < 2; ++i) {
    write_pgm(clean.file("img" + std::to_string(i) + ".pgm"),
              generate_clean_plane(80, 80, 2000 + i));
  }
  DatasetOptions options;
  options.n_param_sets = 3;
  options.crops_per_image = 2;
  options.crop_size = 64;
  options.seed = 123;
  build_dataset(clean.str(), out1.str(), options);
  build_dataset(clean.str(), out2.str(), options);

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(out1.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), out1.path());
    CHECK(slurp(entry.path()) == slurp(out2.path() / rel));
  }
}

TEST_CASE("dataset residual is nonzero iff some interval has positive scale") {
  testutil::TempDir clean("ds_res_clean");
  testutil::TempDir out("ds_res_out");
  write_pgm(clean.file("img.pgm"), generate_clean_plane(96, 96, 9));
  DatasetOptions options;
  options.n_param_sets = 2;
  options.crops_per_image = 4;
  options.crop_size = 64;
  options.seed = 31;
  const auto manifest = build_dataset(clean.str(), out.str(), options);
  const Plane source = read_pgm(clean.file("img.pgm"));
  for (const auto& e : manifest.entries) {
    const Plane grainy = read_pgm((out.path() / e.grainy_path).string());
    const auto params = load_params((out.path() / e.params_path).string());
    const Plane crop =
        source.block(e.crop_y, e.crop_x, e.crop_h, e.crop_w);
    bool any_scale = false;
    // Scale matters only where the crop actually has matching intensities.
    for (int r = 0; r < crop.rows(); ++r) {
      for (int c = 0; c < crop.cols(); ++c) {
        const auto iv = select_interval(*params.components[0], crop(r, c));
        if (iv && iv->scaling_factor > 0) any_scale = true;
      }
    }
    const bool differs = grainy != crop;
    if (differs) CHECK(any_scale);
  }
}

TEST_CASE("crop larger than the image is rejected") {
  testutil::TempDir clean("ds_big_clean");
  testutil::TempDir out("ds_big_out");
  write_pgm(clean.file("small.pgm"), generate_clean_plane(32, 32, 1));
  DatasetOptions options;
  options.crop_size = 64;
  CHECK_THROWS_WITH(build_dataset(clean.str(), out.str(), options),
                    doctest::Contains("crop size"));
}

TEST_CASE("empty clean directory is rejected") {
  testutil::TempDir clean("ds_empty");
  testutil::TempDir out("ds_empty_out");
  DatasetOptions options;
  CHECK_THROWS_WITH(build_dataset(clean.str(), out.str(), options),
                    doctest::Contains("no .pgm"));
}

TEST_CASE("generate_clean_plane is deterministic and spans kinds") {
  const Plane a = generate_clean_plane(64, 64, 5);
  const Plane b = generate_clean_plane(64, 64, 5);
  CHECK(a == b);
  std::set<int> kinds;
  for (std::uint64_t s = 0; s < 16; ++s) {
    const Plane p = generate_clean_plane(32, 32, s);
    const bool flat = (p.array() == p(0, 0)).all();
    kinds.insert(flat ? 0 : 1);
  }
  CHECK(kinds.size() == 2);
}
