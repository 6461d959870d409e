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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grainkit/media.hpp"
#include "grainkit/sampler.hpp"

namespace grainkit {

struct ManifestEntry {
  std::string clean_path;   // source image the crop was taken from
  std::string grainy_path;  // relative to the manifest directory
  std::string params_path;  // relative to the manifest directory
  std::uint64_t seed = 0;   // synthesis seed for this entry
  int crop_x = 0;
  int crop_y = 0;
  int crop_w = 0;
  int crop_h = 0;
};

struct DatasetManifest {
  std::uint64_t sampler_seed = 0;
  SamplerConstraints constraints;
  std::vector<ManifestEntry> entries;
};

struct DatasetOptions {
  int n_param_sets = 300;
  int crops_per_image = 1;
  int crop_size = 256;
  std::uint64_t seed = 0;
  SamplerConstraints constraints;
};

// Pairs random crops of the clean images with sampled parameter sets and
// synthesised grain. Layout under out_dir: grainy/NNNNNN.pgm|ppm,
// params/NNNNNN.fgcs, manifest.tsv. Fully reproducible from the seed.
DatasetManifest build_dataset(const std::string& clean_dir,
                              const std::string& out_dir,
                              const DatasetOptions& options);

void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

// Procedural grain-free test content: flat fields, gradients and smooth
// blobs spanning the intensity range.
Plane generate_clean_plane(int width, int height, std::uint64_t seed);

}  // namespace grainkit
