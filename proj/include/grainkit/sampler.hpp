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
#include <set>

#include "grainkit/fgc.hpp"
#include "grainkit/rng.hpp"

namespace grainkit {

// Constraints for random parameter generation. Defaults follow the training
// recipe: log2 scale in {3,4,5}, 16 luma / 6 chroma intervals, scales in
// multiples of 10, one cutoff per interval shared by both axes, and bounded
// scale/cutoff changes between consecutive intervals.
struct SamplerConstraints {
  std::set<int> log2_choices = {3, 4, 5};
  int luma_intervals = 16;
  int chroma_intervals = 6;
  int scale_step = 10;
  int scale_min = 0;
  int scale_max = 250;
  int luma_cutoff_min = 3;
  int luma_cutoff_max = 14;
  int chroma_cutoff_min = 4;
  int chroma_cutoff_max = 8;
  int max_scale_delta = 40;
  int max_cutoff_delta = 2;
};

// n contiguous intervals partitioning [0,255], each with a step-quantised
// scaling factor and a single cutoff used for both axes; consecutive
// intervals differ by at most max_scale_delta / max_cutoff_delta.
ComponentModel sample_component(Rng& rng, int n_intervals,
                                const SamplerConstraints& constraints,
                                bool is_luma);

// A full parameter set with all three components present. Always valid.
FilmGrainParams sample_params(Rng& rng, const SamplerConstraints& constraints);

}  // namespace grainkit
