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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace grainkit {

// Film Grain Characteristics parameters, frequency-filtering flavour.
// Field semantics follow the FGC SEI message; only model 0 (frequency
// filtering) with additive blending is supported.

inline constexpr int kCutoffMin = 2;
inline constexpr int kCutoffMax = 14;
inline constexpr int kLog2ScaleMin = 2;
inline constexpr int kLog2ScaleMax = 7;
inline constexpr int kMaxIntervals = 256;
inline constexpr int kNumModelValues = 3;  // scale, cutoff_h, cutoff_v

// One pixel-intensity interval sharing a gain and a cut-off pair.
struct IntensityInterval {
  std::uint8_t lower = 0;
  std::uint8_t upper = 255;
  std::uint8_t scaling_factor = 0;
  std::uint8_t cutoff_h = 8;
  std::uint8_t cutoff_v = 8;

  bool operator==(const IntensityInterval&) const = default;
};

// Per colour component interval list. Intervals must be sorted by lower
// bound and pairwise non-overlapping; validate() enforces it.
struct ComponentModel {
  std::vector<IntensityInterval> intervals;

  bool operator==(const ComponentModel&) const = default;
};

struct FilmGrainParams {
  std::uint8_t model_id = 0;          // 0 = frequency filtering
  std::uint8_t blending_mode_id = 0;  // 0 = additive
  std::uint8_t log2_scale_factor = 4;
  // Y, Cb, Cr in that order; a disengaged optional means the component
  // model present flag is 0.
  std::array<std::optional<ComponentModel>, 3> components;

  bool operator==(const FilmGrainParams&) const = default;
};

inline const char* component_name(int c) {
  static constexpr const char* names[3] = {"Y", "Cb", "Cr"};
  return names[c];
}

struct Violation {
  std::string field;    // e.g. "components[0].intervals[3].cutoff_h"
  std::string rule;     // short rule id, e.g. "cutoff-range"
  std::string message;  // human-readable
};

// ok() is derived from the violation list so the two can never disagree.
struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every range and ordering invariant. Violations are data, not
// failures; this never throws.
ValidationReport validate(const FilmGrainParams& params);

// ---------------------------------------------------------------------------
// Binary container. Byte layout:
//   magic "FGCS" | version u8=1 | model_id u8 | blending_mode_id u8 |
//   log2_scale_factor u8 | 3x component: present u8, and when present
//   interval_count u16 big-endian followed by interval_count records of
//   lower u8, upper u8, scaling_factor u8, cutoff_h u8, cutoff_v u8.

class CodecError : public std::runtime_error {
 public:
  enum class Kind {
    kBadMagic,
    kUnsupportedVersion,
    kTruncated,
    kOutOfRange,
    kTrailingData,
    kInvalidParams,  // encode precondition failure
  };

  CodecError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_binary(const FilmGrainParams& params);
FilmGrainParams decode_binary(const std::vector<std::uint8_t>& bytes);

// ---------------------------------------------------------------------------
// Text form: UTF-8 "key: value" lines keyed by the SEI field names with
// per-component / per-interval suffixes, '#' starts a comment. Example key:
// SEIFGCIntensityIntervalLowerBoundComp0Interval3.

class TextError : public std::runtime_error {
 public:
  TextError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

std::string encode_text(const FilmGrainParams& params);
FilmGrainParams decode_text(const std::string& text);

// File helpers; format chosen by extension (.fgcs binary, anything else text).
void save_params(const FilmGrainParams& params, const std::string& path);
FilmGrainParams load_params(const std::string& path);

}  // namespace grainkit
