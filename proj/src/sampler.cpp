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

#include "grainkit/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace grainkit {

namespace {

// n-1 distinct interior cut points in [1,255], sorted (partial Fisher-Yates).
std::vector<int> sample_cut_points(Rng& rng, int n_intervals) {
  std::vector<int> pool(255);
  for (int i = 0; i < 255; ++i) pool[i] = i + 1;
  std::vector<int> cuts;
  cuts.reserve(n_intervals - 1);
  for (int i = 0; i < n_intervals - 1; ++i) {
    const auto j =
        i + static_cast<int>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    cuts.push_back(pool[i]);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// Uniform step-quantised draw from [lo, hi] intersected with step multiples.
int sample_quantised(Rng& rng, int lo, int hi, int step) {
  const int first = (lo + step - 1) / step;
  const int last = hi / step;
  return step * static_cast<int>(rng.next_range(first, last));
}

}  // namespace

ComponentModel sample_component(Rng& rng, int n_intervals,
                                const SamplerConstraints& constraints,
                                bool is_luma) {
  if (n_intervals < 1 || n_intervals > kMaxIntervals) {
    throw std::invalid_argument("interval count must be in 1..256, got " +
                                std::to_string(n_intervals));
  }
  const int cut_lo =
      is_luma ? constraints.luma_cutoff_min : constraints.chroma_cutoff_min;
  const int cut_hi =
      is_luma ? constraints.luma_cutoff_max : constraints.chroma_cutoff_max;

  const std::vector<int> cuts = sample_cut_points(rng, n_intervals);

  ComponentModel model;
  model.intervals.reserve(n_intervals);
  int scale = 0, cutoff = 0;
  for (int i = 0; i < n_intervals; ++i) {
    // Drawing each value inside the window allowed by its predecessor keeps
    // every sample within the delta bounds without rejection.
    if (i == 0) {
      scale = sample_quantised(rng, constraints.scale_min,
                               constraints.scale_max, constraints.scale_step);
      cutoff = static_cast<int>(rng.next_range(cut_lo, cut_hi));
    } else {
      scale = sample_quantised(
          rng, std::max(constraints.scale_min, scale - constraints.max_scale_delta),
          std::min(constraints.scale_max, scale + constraints.max_scale_delta),
          constraints.scale_step);
      cutoff = static_cast<int>(
          rng.next_range(std::max(cut_lo, cutoff - constraints.max_cutoff_delta),
                         std::min(cut_hi, cutoff + constraints.max_cutoff_delta)));
    }
    IntensityInterval iv;
    iv.lower = static_cast<std::uint8_t>(i == 0 ? 0 : cuts[i - 1]);
    iv.upper = static_cast<std::uint8_t>(i == n_intervals - 1 ? 255
                                                              : cuts[i] - 1);
    iv.scaling_factor = static_cast<std::uint8_t>(scale);
    iv.cutoff_h = static_cast<std::uint8_t>(cutoff);
    iv.cutoff_v = static_cast<std::uint8_t>(cutoff);
    model.intervals.push_back(iv);
  }
  return model;
}

FilmGrainParams sample_params(Rng& rng,
                              const SamplerConstraints& constraints) {
  FilmGrainParams params;
  params.model_id = 0;
  params.blending_mode_id = 0;
  const std::vector<int> log2s(constraints.log2_choices.begin(),
                               constraints.log2_choices.end());
  if (log2s.empty()) throw std::invalid_argument("log2_choices is empty");
  params.log2_scale_factor = static_cast<std::uint8_t>(
      log2s[rng.next_below(log2s.size())]);
  params.components[0] =
      sample_component(rng, constraints.luma_intervals, constraints, true);
  params.components[1] =
      sample_component(rng, constraints.chroma_intervals, constraints, false);
  params.components[2] =
      sample_component(rng, constraints.chroma_intervals, constraints, false);
  return params;
}

}  // namespace grainkit
