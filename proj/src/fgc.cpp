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

#include "grainkit/fgc.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace grainkit {

namespace {

std::string interval_field(int c, int i, const char* name) {
  std::ostringstream os;
  os << "components[" << c << "].intervals[" << i << "]." << name;
  return os.str();
}

void check_range(ValidationReport& report, const std::string& field, int value,
                 int lo, int hi, const char* rule) {
  if (value < lo || value > hi) {
    std::ostringstream os;
    os << field << " = " << value << " outside [" << lo << "," << hi << "]";
    report.violations.push_back({field, rule, os.str()});
  }
}

}  // namespace

ValidationReport validate(const FilmGrainParams& params) {
  ValidationReport report;
  if (params.model_id != 0) {
    report.violations.push_back(
        {"model_id", "model-id",
         "model_id must be 0 (frequency filtering), got " +
             std::to_string(params.model_id)});
  }
  if (params.blending_mode_id != 0) {
    report.violations.push_back(
        {"blending_mode_id", "blending-mode",
         "blending_mode_id must be 0 (additive), got " +
             std::to_string(params.blending_mode_id)});
  }
  check_range(report, "log2_scale_factor", params.log2_scale_factor,
              kLog2ScaleMin, kLog2ScaleMax, "log2-scale-range");

  for (int c = 0; c < 3; ++c) {
    if (!params.components[c]) continue;
    const auto& intervals = params.components[c]->intervals;
    const std::string comp = "components[" + std::to_string(c) + "]";
    if (intervals.empty() || intervals.size() > kMaxIntervals) {
      report.violations.push_back(
          {comp + ".intervals", "interval-count",
           comp + " has " + std::to_string(intervals.size()) +
               " intervals, expected 1..256"});
    }
    for (size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      if (iv.lower > iv.upper) {
        report.violations.push_back(
            {interval_field(c, static_cast<int>(i), "lower"), "lower-le-upper",
             interval_field(c, static_cast<int>(i), "lower") + " = " +
                 std::to_string(iv.lower) + " exceeds upper = " +
                 std::to_string(iv.upper)});
      }
      check_range(report, interval_field(c, static_cast<int>(i), "cutoff_h"),
                  iv.cutoff_h, kCutoffMin, kCutoffMax, "cutoff-range");
      check_range(report, interval_field(c, static_cast<int>(i), "cutoff_v"),
                  iv.cutoff_v, kCutoffMin, kCutoffMax, "cutoff-range");
      if (i > 0 && intervals[i - 1].upper >= iv.lower &&
          intervals[i - 1].lower <= iv.upper) {
        // Overlap (also catches unsorted input whose ranges intersect).
        report.violations.push_back(
            {interval_field(c, static_cast<int>(i), "lower"),
             "interval-overlap",
             comp + " intervals " + std::to_string(i - 1) + " and " +
                 std::to_string(i) + " overlap"});
      } else if (i > 0 && intervals[i - 1].lower > iv.lower) {
        report.violations.push_back(
            {interval_field(c, static_cast<int>(i), "lower"),
             "interval-order",
             comp + " intervals not sorted by lower bound at index " +
                 std::to_string(i)});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Binary container

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'G', 'C', 'S'};
constexpr std::uint8_t kVersion = 1;

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint8_t u8(const char* what) {
    if (pos_ >= bytes_.size()) {
      throw CodecError(CodecError::Kind::kTruncated,
                       std::string("truncated payload while reading ") + what);
    }
    return bytes_[pos_++];
  }

  std::uint16_t u16_be(const char* what) {
    const std::uint16_t hi = u8(what);
    const std::uint16_t lo = u8(what);
    return static_cast<std::uint16_t>(hi << 8 | lo);
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  size_t pos_ = 0;
};

void require_range(int value, int lo, int hi, const std::string& field) {
  if (value < lo || value > hi) {
    throw CodecError(CodecError::Kind::kOutOfRange,
                     "field " + field + " = " + std::to_string(value) +
                         " outside [" + std::to_string(lo) + "," +
                         std::to_string(hi) + "]");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_binary(const FilmGrainParams& params) {
  const ValidationReport report = validate(params);
  if (!report.ok()) {
    throw CodecError(CodecError::Kind::kInvalidParams,
                     "refusing to encode invalid parameters: " +
                         report.violations.front().message);
  }
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  out.push_back(params.model_id);
  out.push_back(params.blending_mode_id);
  out.push_back(params.log2_scale_factor);
  for (int c = 0; c < 3; ++c) {
    const auto& comp = params.components[c];
    out.push_back(comp ? 1 : 0);
    if (!comp) continue;
    const auto n = static_cast<std::uint16_t>(comp->intervals.size());
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n & 0xff));
    for (const auto& iv : comp->intervals) {
      out.push_back(iv.lower);
      out.push_back(iv.upper);
      out.push_back(iv.scaling_factor);
      out.push_back(iv.cutoff_h);
      out.push_back(iv.cutoff_v);
    }
  }
  return out;
}

FilmGrainParams decode_binary(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes);
  std::uint8_t magic[4];
  for (auto& m : magic) m = in.u8("magic");
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw CodecError(CodecError::Kind::kBadMagic,
                     "bad magic, expected \"FGCS\"");
  }
  const std::uint8_t version = in.u8("version");
  if (version != kVersion) {
    throw CodecError(CodecError::Kind::kUnsupportedVersion,
                     "unsupported version " + std::to_string(version) +
                         ", expected " + std::to_string(kVersion));
  }
  FilmGrainParams params;
  params.model_id = in.u8("model_id");
  require_range(params.model_id, 0, 0, "model_id");
  params.blending_mode_id = in.u8("blending_mode_id");
  require_range(params.blending_mode_id, 0, 0, "blending_mode_id");
  params.log2_scale_factor = in.u8("log2_scale_factor");
  require_range(params.log2_scale_factor, kLog2ScaleMin, kLog2ScaleMax,
                "log2_scale_factor");
  for (int c = 0; c < 3; ++c) {
    const std::uint8_t present = in.u8("component present flag");
    if (present > 1) {
      throw CodecError(CodecError::Kind::kOutOfRange,
                       "component present flag must be 0 or 1, got " +
                           std::to_string(present));
    }
    if (!present) continue;
    const int n = in.u16_be("interval count");
    require_range(n, 1, kMaxIntervals,
                  std::string("interval count of ") + component_name(c));
    ComponentModel model;
    model.intervals.reserve(n);
    int prev_upper = -1;
    for (int i = 0; i < n; ++i) {
      IntensityInterval iv;
      iv.lower = in.u8("interval lower bound");
      iv.upper = in.u8("interval upper bound");
      iv.scaling_factor = in.u8("interval scaling factor");
      iv.cutoff_h = in.u8("interval cutoff_h");
      iv.cutoff_v = in.u8("interval cutoff_v");
      const std::string where = std::string(component_name(c)) + " interval " +
                                std::to_string(i);
      if (iv.lower > iv.upper) {
        throw CodecError(CodecError::Kind::kOutOfRange,
                         "field " + where + " lower bound " +
                             std::to_string(iv.lower) + " exceeds upper " +
                             std::to_string(iv.upper));
      }
      if (static_cast<int>(iv.lower) <= prev_upper) {
        throw CodecError(CodecError::Kind::kOutOfRange,
                         "field " + where + " overlaps or is out of order");
      }
      require_range(iv.cutoff_h, kCutoffMin, kCutoffMax, where + " cutoff_h");
      require_range(iv.cutoff_v, kCutoffMin, kCutoffMax, where + " cutoff_v");
      prev_upper = iv.upper;
      model.intervals.push_back(iv);
    }
    params.components[c] = std::move(model);
  }
  if (in.remaining() != 0) {
    throw CodecError(CodecError::Kind::kTrailingData,
                     std::to_string(in.remaining()) +
                         " trailing bytes after parameter payload");
  }
  return params;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string key_comp(const char* base, int c) {
  return std::string(base) + "Comp" + std::to_string(c);
}

std::string key_interval(const char* base, int c, int i) {
  return key_comp(base, c) + "Interval" + std::to_string(i);
}

struct ParsedLine {
  std::string key;
  long value;
  int line;
  int key_column;
  int value_column;
};

}  // namespace

std::string encode_text(const FilmGrainParams& params) {
  const ValidationReport report = validate(params);
  if (!report.ok()) {
    throw CodecError(CodecError::Kind::kInvalidParams,
                     "refusing to encode invalid parameters: " +
                         report.violations.front().message);
  }
  std::ostringstream os;
  os << "# film grain characteristics parameters\n";
  os << "SEIFGCModelID: " << int(params.model_id) << "\n";
  os << "SEIFGCBlendingModeID: " << int(params.blending_mode_id) << "\n";
  os << "SEIFGCLog2ScaleFactor: " << int(params.log2_scale_factor) << "\n";
  for (int c = 0; c < 3; ++c) {
    const auto& comp = params.components[c];
    os << key_comp("SEIFGCCompModelPresent", c) << ": " << (comp ? 1 : 0)
       << "\n";
    if (!comp) continue;
    os << key_comp("SEIFGCNumIntensityIntervalMinus1", c) << ": "
       << comp->intervals.size() - 1 << "\n";
    os << key_comp("SEIFGCNumModelValuesMinus1", c) << ": "
       << kNumModelValues - 1 << "\n";
    for (size_t i = 0; i < comp->intervals.size(); ++i) {
      const auto& iv = comp->intervals[i];
      const int ii = static_cast<int>(i);
      os << key_interval("SEIFGCIntensityIntervalLowerBound", c, ii) << ": "
         << int(iv.lower) << "\n";
      os << key_interval("SEIFGCIntensityIntervalUpperBound", c, ii) << ": "
         << int(iv.upper) << "\n";
      os << key_interval("SEIFGCCompModelValue", c, ii) << "Value0: "
         << int(iv.scaling_factor) << "\n";
      os << key_interval("SEIFGCCompModelValue", c, ii) << "Value1: "
         << int(iv.cutoff_h) << "\n";
      os << key_interval("SEIFGCCompModelValue", c, ii) << "Value2: "
         << int(iv.cutoff_v) << "\n";
    }
  }
  return os.str();
}

FilmGrainParams decode_text(const std::string& text) {
  // Pass 1: tokenize into key/value pairs with positions.
  std::map<std::string, ParsedLine> fields;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;  // blank or comment-only
    const size_t colon = line.find(':', begin);
    if (colon == std::string::npos) {
      throw TextError(line_no, static_cast<int>(line.size()) + 1,
                      "expected \"key: value\"");
    }
    size_t key_end = line.find_last_not_of(" \t", colon - 1);
    if (key_end == std::string::npos || key_end < begin) {
      throw TextError(line_no, static_cast<int>(begin) + 1, "empty key");
    }
    const std::string key = line.substr(begin, key_end - begin + 1);
    size_t vbegin = line.find_first_not_of(" \t", colon + 1);
    if (vbegin == std::string::npos) {
      throw TextError(line_no, static_cast<int>(colon) + 2, "missing value");
    }
    size_t vend = line.find_last_not_of(" \t\r");
    const std::string value_str = line.substr(vbegin, vend - vbegin + 1);
    long value = 0;
    size_t consumed = 0;
    try {
      value = std::stol(value_str, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != value_str.size()) {
      throw TextError(line_no, static_cast<int>(vbegin) + 1,
                      "value \"" + value_str + "\" is not an integer");
    }
    if (fields.count(key)) {
      throw TextError(line_no, static_cast<int>(begin) + 1,
                      "duplicate key " + key);
    }
    fields[key] = {key, value, line_no, static_cast<int>(begin) + 1,
                   static_cast<int>(vbegin) + 1};
  }

  // Pass 2: consume fields in schema order; anything left over is unknown.
  auto take = [&](const std::string& key) -> ParsedLine {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw TextError(line_no, 1, "missing required key " + key);
    }
    ParsedLine parsed = it->second;
    fields.erase(it);
    return parsed;
  };
  auto take_ranged = [&](const std::string& key, long lo, long hi) -> long {
    const ParsedLine parsed = take(key);
    if (parsed.value < lo || parsed.value > hi) {
      throw TextError(parsed.line, parsed.value_column,
                      key + " = " + std::to_string(parsed.value) +
                          " outside [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "]");
    }
    return parsed.value;
  };

  FilmGrainParams params;
  params.model_id =
      static_cast<std::uint8_t>(take_ranged("SEIFGCModelID", 0, 0));
  params.blending_mode_id =
      static_cast<std::uint8_t>(take_ranged("SEIFGCBlendingModeID", 0, 0));
  params.log2_scale_factor = static_cast<std::uint8_t>(
      take_ranged("SEIFGCLog2ScaleFactor", kLog2ScaleMin, kLog2ScaleMax));
  for (int c = 0; c < 3; ++c) {
    const long present =
        take_ranged(key_comp("SEIFGCCompModelPresent", c), 0, 1);
    if (!present) continue;
    const long n =
        take_ranged(key_comp("SEIFGCNumIntensityIntervalMinus1", c), 0, 255) +
        1;
    take_ranged(key_comp("SEIFGCNumModelValuesMinus1", c), kNumModelValues - 1,
                kNumModelValues - 1);
    ComponentModel model;
    for (long i = 0; i < n; ++i) {
      const int ii = static_cast<int>(i);
      IntensityInterval iv;
      iv.lower = static_cast<std::uint8_t>(take_ranged(
          key_interval("SEIFGCIntensityIntervalLowerBound", c, ii), 0, 255));
      iv.upper = static_cast<std::uint8_t>(take_ranged(
          key_interval("SEIFGCIntensityIntervalUpperBound", c, ii), 0, 255));
      iv.scaling_factor = static_cast<std::uint8_t>(take_ranged(
          key_interval("SEIFGCCompModelValue", c, ii) + "Value0", 0, 255));
      iv.cutoff_h = static_cast<std::uint8_t>(
          take_ranged(key_interval("SEIFGCCompModelValue", c, ii) + "Value1",
                      kCutoffMin, kCutoffMax));
      iv.cutoff_v = static_cast<std::uint8_t>(
          take_ranged(key_interval("SEIFGCCompModelValue", c, ii) + "Value2",
                      kCutoffMin, kCutoffMax));
      model.intervals.push_back(iv);
    }
    params.components[c] = std::move(model);
  }
  if (!fields.empty()) {
    const ParsedLine& first = fields.begin()->second;
    throw TextError(first.line, first.key_column,
                    "unknown key " + first.key);
  }
  const ValidationReport report = validate(params);
  if (!report.ok()) {
    throw TextError(line_no, 1,
                    "parameters invalid: " + report.violations.front().message);
  }
  return params;
}

void save_params(const FilmGrainParams& params, const std::string& path) {
  const bool binary = path.size() >= 5 && path.ends_with(".fgcs");
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (binary) {
    const auto bytes = encode_binary(params);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  } else {
    out << encode_text(params);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

FilmGrainParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (path.ends_with(".fgcs")) return decode_binary(bytes);
  return decode_text(std::string(bytes.begin(), bytes.end()));
}

}  // namespace grainkit
