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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>

#include "grainkit/fgc.hpp"
#include "grainkit/media.hpp"

namespace grainkit {

inline constexpr int kPatternSize = 64;

// 64x64 zero-mean unit-variance noise block whose 2-D DCT spectrum is
// confined to column indices < 4*cutoff_h and row indices < 4*cutoff_v
// (DC excluded).
struct GrainPattern {
  Eigen::Matrix<float, kPatternSize, kPatternSize, Eigen::RowMajor> values;
};

// Immutable table of patterns indexed by (cutoff_h, cutoff_v).
class GrainPatternDatabase {
 public:
  GrainPatternDatabase(std::map<std::pair<int, int>, GrainPattern> patterns,
                       std::uint64_t master_seed)
      : patterns_(std::move(patterns)), master_seed_(master_seed) {}

  const GrainPattern& at(int cutoff_h, int cutoff_v) const;
  bool contains(int cutoff_h, int cutoff_v) const {
    return patterns_.count({cutoff_h, cutoff_v}) != 0;
  }
  std::size_t size() const { return patterns_.size(); }
  std::uint64_t master_seed() const { return master_seed_; }

 private:
  std::map<std::pair<int, int>, GrainPattern> patterns_;
  std::uint64_t master_seed_;
};

struct SynthesisConfig {
  int block_size = 8;  // must divide 64
  std::uint64_t seed = 0;
  bool deblock = true;
  int threads = 1;
};

// Builds one pattern: Gaussian field from a (seed, cutoff) keyed stream,
// orthonormal DCT-II low-pass, zeroed DC, inverse transform, renormalised to
// zero mean and unit variance.
GrainPattern generate_pattern(int cutoff_h, int cutoff_v, std::uint64_t seed);

// One pattern per distinct (cutoff_h, cutoff_v) pair used by any component.
GrainPatternDatabase build_pattern_db(const FilmGrainParams& params,
                                      std::uint64_t seed);

// The unique interval with lower <= intensity <= upper, if any.
std::optional<IntensityInterval> select_interval(const ComponentModel& model,
                                                 int intensity);

// Adds grain to one plane. component_tag is 0/1/2 for Y/Cb/Cr and keys the
// per-block pattern offsets. Output is independent of cfg.threads.
Plane synthesize_plane(const Plane& clean, const ComponentModel& model,
                       int log2_scale_factor, const GrainPatternDatabase& db,
                       const SynthesisConfig& cfg, int component_tag);

// Full-frame synthesis; absent components pass through unchanged.
Frame synthesize_frame(const Frame& clean, const FilmGrainParams& params,
                       std::uint64_t seed, int block_size = 8,
                       bool deblock = true, int threads = 1);

}  // namespace grainkit
