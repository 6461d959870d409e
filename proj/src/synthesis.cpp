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

#include "grainkit/synthesis.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "grainkit/rng.hpp"

namespace grainkit {

namespace {

using Matrix64 = Eigen::Matrix<double, kPatternSize, kPatternSize>;

// Orthonormal DCT-II basis: forward C = D * X * D^T, inverse X = D^T * C * D.
const Matrix64& dct_matrix() {
  static const Matrix64 dct = [] {
    Matrix64 m;
    const double n = kPatternSize;
    for (int k = 0; k < kPatternSize; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
      for (int i = 0; i < kPatternSize; ++i) {
        m(k, i) = scale * std::cos(M_PI * (2 * i + 1) * k / (2 * n));
      }
    }
    return m;
  }();
  return dct;
}

void check_cutoff(int cutoff, const char* axis) {
  if (cutoff < kCutoffMin || cutoff > kCutoffMax) {
    throw std::out_of_range(std::string("cutoff_") + axis + " = " +
                            std::to_string(cutoff) + " outside [" +
                            std::to_string(kCutoffMin) + "," +
                            std::to_string(kCutoffMax) + "]");
  }
}

}  // namespace

GrainPattern generate_pattern(int cutoff_h, int cutoff_v, std::uint64_t seed) {
  check_cutoff(cutoff_h, "h");
  check_cutoff(cutoff_v, "v");

  Rng rng(mix_seed(seed, 0x70617474ULL /* "patt" */,
                   static_cast<std::uint64_t>(cutoff_h),
                   static_cast<std::uint64_t>(cutoff_v)));
  Matrix64 field;
  for (int r = 0; r < kPatternSize; ++r) {
    for (int c = 0; c < kPatternSize; ++c) {
      field(r, c) = rng.next_normal();
    }
  }

  const Matrix64& dct = dct_matrix();
  Matrix64 coeff = dct * field * dct.transpose();
  // Low-pass: the [2,14] cutoff index range maps onto the 64-bin frequency
  // axis as 4*cutoff, giving masks from 8 to 56 bins.
  const int keep_cols = 4 * cutoff_h;
  const int keep_rows = 4 * cutoff_v;
  coeff.rightCols(kPatternSize - keep_cols).setZero();
  coeff.bottomRows(kPatternSize - keep_rows).setZero();
  coeff(0, 0) = 0.0;
  Matrix64 filtered = dct.transpose() * coeff * dct;

  const double mean = filtered.mean();
  filtered.array() -= mean;
  const double variance = filtered.array().square().mean();
  if (variance <= 0.0) {
    throw std::runtime_error("degenerate grain pattern (zero variance)");
  }
  filtered /= std::sqrt(variance);

  GrainPattern pattern;
  pattern.values = filtered.cast<float>();
  return pattern;
}

const GrainPattern& GrainPatternDatabase::at(int cutoff_h,
                                             int cutoff_v) const {
  auto it = patterns_.find({cutoff_h, cutoff_v});
  if (it == patterns_.end()) {
    throw std::out_of_range("no grain pattern for cutoff pair (" +
                            std::to_string(cutoff_h) + "," +
                            std::to_string(cutoff_v) + ")");
  }
  return it->second;
}

GrainPatternDatabase build_pattern_db(const FilmGrainParams& params,
                                      std::uint64_t seed) {
  std::set<std::pair<int, int>> pairs;
  for (const auto& comp : params.components) {
    if (!comp) continue;
    for (const auto& iv : comp->intervals) {
      pairs.emplace(iv.cutoff_h, iv.cutoff_v);
    }
  }
  std::map<std::pair<int, int>, GrainPattern> patterns;
  for (const auto& [h, v] : pairs) {
    patterns.emplace(std::make_pair(h, v), generate_pattern(h, v, seed));
  }
  return GrainPatternDatabase(std::move(patterns), seed);
}

std::optional<IntensityInterval> select_interval(const ComponentModel& model,
                                                 int intensity) {
  // Intervals are sorted and non-overlapping, so the first match is the
  // only one.
  for (const auto& iv : model.intervals) {
    if (intensity >= iv.lower && intensity <= iv.upper) return iv;
    if (intensity < iv.lower) break;
  }
  return std::nullopt;
}

namespace {

// Rounded mean of a clean-plane block; exact integer arithmetic.
int block_intensity(const Plane& clean, int r0, int c0, int h, int w) {
  long sum = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) sum += clean(r0 + r, c0 + c);
  }
  const long count = static_cast<long>(h) * w;
  return static_cast<int>((2 * sum + count) / (2 * count));
}

void run_rows_parallel(int rows, int threads, auto&& body) {
  if (threads <= 1 || rows <= 1) {
    for (int r = 0; r < rows; ++r) body(r);
    return;
  }
  const int n = std::min(threads, rows);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      for (int r = t; r < rows; r += n) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Plane synthesize_plane(const Plane& clean, const ComponentModel& model,
                       int log2_scale_factor, const GrainPatternDatabase& db,
                       const SynthesisConfig& cfg, int component_tag) {
  const int bs = cfg.block_size;
  if (bs <= 0 || kPatternSize % bs != 0) {
    throw std::invalid_argument("block_size must divide 64, got " +
                                std::to_string(bs));
  }
  const int height = static_cast<int>(clean.rows());
  const int width = static_cast<int>(clean.cols());
  const int block_rows = (height + bs - 1) / bs;
  const int block_cols = (width + bs - 1) / bs;
  const int offset_choices = kPatternSize / bs;  // offsets are multiples of bs
  const float gain_base = std::ldexp(1.0f, -log2_scale_factor);

  FloatPlane grain = FloatPlane::Zero(height, width);
  // A block takes part in deblocking only if it actually received grain.
  std::vector<std::uint8_t> grainy(
      static_cast<std::size_t>(block_rows) * block_cols, 0);

  // Phase 1: per-block grain, position-keyed so any schedule gives the same
  // result.
  run_rows_parallel(block_rows, cfg.threads, [&](int br) {
    for (int bc = 0; bc < block_cols; ++bc) {
      const int r0 = br * bs, c0 = bc * bs;
      const int h = std::min(bs, height - r0);
      const int w = std::min(bs, width - c0);
      const int intensity = block_intensity(clean, r0, c0, h, w);
      const auto interval = select_interval(model, intensity);
      if (!interval || interval->scaling_factor == 0) continue;

      const GrainPattern& pattern =
          db.at(interval->cutoff_h, interval->cutoff_v);
      const std::uint64_t key =
          mix_seed(cfg.seed, static_cast<std::uint64_t>(component_tag),
                   static_cast<std::uint64_t>(br),
                   static_cast<std::uint64_t>(bc));
      const int ox =
          bs * static_cast<int>(key % static_cast<std::uint64_t>(offset_choices));
      const int oy = bs * static_cast<int>((key >> 16) %
                                           static_cast<std::uint64_t>(offset_choices));
      const float gain = static_cast<float>(interval->scaling_factor) * gain_base;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          grain(r0 + r, c0 + c) = pattern.values(oy + r, ox + c) * gain;
        }
      }
      grainy[static_cast<std::size_t>(br) * block_cols + bc] = 1;
    }
  });

  // Phase 2: deblock. The two grain columns either side of a vertical block
  // boundary are replaced by their 50/50 average (horizontal pass), then the
  // same across horizontal boundaries (vertical pass, applied to the result
  // of the first). Only boundaries between two grainy blocks are filtered.
  if (cfg.deblock && bs >= 2) {
    auto is_grainy = [&](int br, int bc) {
      return grainy[static_cast<std::size_t>(br) * block_cols + bc] != 0;
    };
    for (int bc = 1; bc < block_cols; ++bc) {
      const int c = bc * bs;
      if (c >= width) break;
      for (int br = 0; br < block_rows; ++br) {
        if (!is_grainy(br, bc - 1) || !is_grainy(br, bc)) continue;
        const int r0 = br * bs;
        const int h = std::min(bs, height - r0);
        for (int r = 0; r < h; ++r) {
          const float avg = 0.5f * (grain(r0 + r, c - 1) + grain(r0 + r, c));
          grain(r0 + r, c - 1) = avg;
          grain(r0 + r, c) = avg;
        }
      }
    }
    for (int br = 1; br < block_rows; ++br) {
      const int r = br * bs;
      if (r >= height) break;
      for (int bc = 0; bc < block_cols; ++bc) {
        if (!is_grainy(br - 1, bc) || !is_grainy(br, bc)) continue;
        const int c0 = bc * bs;
        const int w = std::min(bs, width - c0);
        for (int c = 0; c < w; ++c) {
          const float avg = 0.5f * (grain(r - 1, c0 + c) + grain(r, c0 + c));
          grain(r - 1, c0 + c) = avg;
          grain(r, c0 + c) = avg;
        }
      }
    }
  }

  // Phase 3: additive blend, one rounding step, clip to [0,255].
  Plane out(height, width);
  run_rows_parallel(height, cfg.threads, [&](int r) {
    for (int c = 0; c < width; ++c) {
      const int g = round_half_away(grain(r, c));
      out(r, c) = clip_to_byte(static_cast<int>(clean(r, c)) + g);
    }
  });
  return out;
}

Frame synthesize_frame(const Frame& clean, const FilmGrainParams& params,
                       std::uint64_t seed, int block_size, bool deblock,
                       int threads) {
  const ValidationReport report = validate(params);
  if (!report.ok()) {
    throw std::invalid_argument("invalid film grain parameters: " +
                                report.violations.front().message);
  }
  if (!frame_dims_valid(clean)) {
    throw std::invalid_argument("frame chroma planes are not 4:2:0 sized");
  }
  const GrainPatternDatabase db = build_pattern_db(params, seed);
  SynthesisConfig cfg;
  cfg.block_size = block_size;
  cfg.seed = seed;
  cfg.deblock = deblock;
  cfg.threads = threads;

  Frame out = clean;
  const Plane* planes[3] = {&clean.y, &clean.cb, &clean.cr};
  Plane* outs[3] = {&out.y, &out.cb, &out.cr};
  for (int c = 0; c < 3; ++c) {
    if (!params.components[c]) continue;
    *outs[c] = synthesize_plane(*planes[c], *params.components[c],
                                params.log2_scale_factor, db, cfg, c);
  }
  return out;
}

}  // namespace grainkit
