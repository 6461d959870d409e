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

#include <string>

#include "grainkit/fgc.hpp"

namespace grainkit {

// SVG rendering of one component's parameter curves: pixel value on X
// ([0,255]), scaling-factor step curve on the blue left axis ([0,255]),
// cutoff step curve on the green right axis ([2,14]), dashed separators at
// interval edges, and the log2 scale factor folded into the left axis label
// as an effective gain annotation.
std::string render_params_svg(const FilmGrainParams& params, int component);

// Numeric companion table, one row per interval:
// lower, upper, scaling_factor, cutoff_h, cutoff_v, effective gain.
std::string render_params_table(const FilmGrainParams& params, int component);

// Writes both files: <out_prefix>.svg and <out_prefix>.tsv.
void plot_params(const FilmGrainParams& params, int component,
                 const std::string& out_prefix);

}  // namespace grainkit
