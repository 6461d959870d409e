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

#include "grainkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grainkit/synthesis.hpp"

namespace fs = std::filesystem;

namespace grainkit {

namespace {

constexpr std::uint64_t kParamsTag = 0x7061726dULL;  // "parm"
constexpr std::uint64_t kEntryTag = 0x656e7472ULL;   // "entr"

std::string entry_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

std::vector<std::string> list_images(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") paths.push_back(entry.path().string());
  }
  // Directory iteration order is unspecified; sorting keeps builds
  // reproducible.
  std::sort(paths.begin(), paths.end());
  return paths;
}

Frame crop_frame(const Frame& frame, int x, int y, int w, int h) {
  Frame out;
  out.y = frame.y.block(y, x, h, w);
  out.cb = frame.cb.block(y / 2, x / 2, chroma_dim(h), chroma_dim(w));
  out.cr = frame.cr.block(y / 2, x / 2, chroma_dim(h), chroma_dim(w));
  return out;
}

std::string constraints_comment(const SamplerConstraints& c,
                                std::uint64_t seed) {
  std::ostringstream os;
  os << "# seed=" << seed << " log2={";
  bool first = true;
  for (int v : c.log2_choices) {
    if (!first) os << ",";
    os << v;
    first = false;
  }
  os << "} luma_intervals=" << c.luma_intervals
     << " chroma_intervals=" << c.chroma_intervals
     << " scale_step=" << c.scale_step << " scale=[" << c.scale_min << ","
     << c.scale_max << "]"
     << " luma_cutoff=[" << c.luma_cutoff_min << "," << c.luma_cutoff_max
     << "]"
     << " chroma_cutoff=[" << c.chroma_cutoff_min << "," << c.chroma_cutoff_max
     << "]"
     << " max_scale_delta=" << c.max_scale_delta
     << " max_cutoff_delta=" << c.max_cutoff_delta;
  return os.str();
}

}  // namespace

DatasetManifest build_dataset(const std::string& clean_dir,
                              const std::string& out_dir,
                              const DatasetOptions& options) {
  const std::vector<std::string> clean_paths = list_images(clean_dir);
  if (clean_paths.empty()) {
    throw std::runtime_error("no .pgm/.ppm images found in " + clean_dir);
  }
  if (options.n_param_sets < 1) {
    throw std::invalid_argument("n_param_sets must be positive");
  }
  fs::create_directories(fs::path(out_dir) / "grainy");
  fs::create_directories(fs::path(out_dir) / "params");

  // Parameter sets are drawn up front from a dedicated stream so entry
  // generation order cannot disturb them.
  std::vector<FilmGrainParams> param_sets;
  param_sets.reserve(options.n_param_sets);
  Rng param_rng(mix_seed(options.seed, kParamsTag));
  for (int i = 0; i < options.n_param_sets; ++i) {
    param_sets.push_back(sample_params(param_rng, options.constraints));
  }

  DatasetManifest manifest;
  manifest.sampler_seed = options.seed;
  manifest.constraints = options.constraints;

  std::size_t index = 0;
  for (const auto& clean_path : clean_paths) {
    const auto image = read_pnm(clean_path);
    const bool is_gray = std::holds_alternative<Plane>(image);
    const Frame frame = is_gray
                            ? frame_from_plane(std::get<Plane>(image))
                            : std::get<Frame>(image);
    const int fw = static_cast<int>(frame.y.cols());
    const int fh = static_cast<int>(frame.y.rows());
    if (options.crop_size > fw || options.crop_size > fh) {
      throw std::runtime_error(clean_path + ": crop size " +
                               std::to_string(options.crop_size) +
                               " exceeds image " + std::to_string(fw) + "x" +
                               std::to_string(fh));
    }
    for (int k = 0; k < options.crops_per_image; ++k, ++index) {
      const std::uint64_t entry_seed = mix_seed(options.seed, kEntryTag, index);
      Rng rng(entry_seed);
      // Even crop origin keeps the 4:2:0 chroma grid aligned.
      const int max_x = (fw - options.crop_size) / 2;
      const int max_y = (fh - options.crop_size) / 2;
      const int x = 2 * static_cast<int>(rng.next_range(0, max_x));
      const int y = 2 * static_cast<int>(rng.next_range(0, max_y));
      const auto& params =
          param_sets[rng.next_below(param_sets.size())];

      const Frame crop =
          crop_frame(frame, x, y, options.crop_size, options.crop_size);
      const Frame grainy = synthesize_frame(crop, params, entry_seed);

      ManifestEntry entry;
      entry.clean_path = clean_path;
      entry.seed = entry_seed;
      entry.crop_x = x;
      entry.crop_y = y;
      entry.crop_w = options.crop_size;
      entry.crop_h = options.crop_size;
      const std::string stem = entry_name(index);
      entry.params_path = "params/" + stem + ".fgcs";
      if (is_gray) {
        entry.grainy_path = "grainy/" + stem + ".pgm";
        write_pgm((fs::path(out_dir) / entry.grainy_path).string(), grainy.y);
      } else {
        entry.grainy_path = "grainy/" + stem + ".ppm";
        write_ppm((fs::path(out_dir) / entry.grainy_path).string(), grainy);
      }
      save_params(params, (fs::path(out_dir) / entry.params_path).string());
      manifest.entries.push_back(std::move(entry));
    }
  }
  write_manifest(manifest, (fs::path(out_dir) / "manifest.tsv").string());
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << constraints_comment(manifest.constraints, manifest.sampler_seed)
      << "\n";
  out << "clean\tgrainy\tparams\tseed\tcrop_x\tcrop_y\tcrop_w\tcrop_h\n";
  for (const auto& e : manifest.entries) {
    out << e.clean_path << "\t" << e.grainy_path << "\t" << e.params_path
        << "\t" << e.seed << "\t" << e.crop_x << "\t" << e.crop_y << "\t"
        << e.crop_w << "\t" << e.crop_h << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  DatasetManifest manifest;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) {
        manifest.sampler_seed = std::stoull(line.substr(pos + 5));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream is(line);
    ManifestEntry e;
    std::string seed_str;
    if (!(std::getline(is, e.clean_path, '\t') &&
          std::getline(is, e.grainy_path, '\t') &&
          std::getline(is, e.params_path, '\t') &&
          std::getline(is, seed_str, '\t') &&
          (is >> e.crop_x && is.get() == '\t' && is >> e.crop_y &&
           is.get() == '\t' && is >> e.crop_w && is.get() == '\t' &&
           is >> e.crop_h))) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed manifest row");
    }
    e.seed = std::stoull(seed_str);
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

Plane generate_clean_plane(int width, int height, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x636c65616eULL /* "clean" */));
  Plane plane(height, width);
  const int kind = static_cast<int>(rng.next_below(4));
  switch (kind) {
    case 0: {  // flat field
      const auto level = static_cast<std::uint8_t>(rng.next_range(8, 247));
      plane.setConstant(level);
      break;
    }
    case 1: {  // linear gradient at a random angle
      const double theta = rng.next_unit() * 2.0 * M_PI;
      const double dx = std::cos(theta), dy = std::sin(theta);
      const double lo = rng.next_range(0, 96);
      const double hi = rng.next_range(160, 255);
      const double diag = std::hypot(width, height);
      for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
          const double t = 0.5 + (c * dx + r * dy) / (2.0 * diag);
          plane(r, c) = clip_to_byte(round_half_away(lo + t * (hi - lo)));
        }
      }
      break;
    }
    case 2: {  // smooth radial blob
      const double cx = rng.next_unit() * width;
      const double cy = rng.next_unit() * height;
      const double base = rng.next_range(16, 128);
      const double amp = rng.next_range(32, 120);
      const double radius = 0.3 * std::max(width, height) + 1;
      for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
          const double d2 = ((c - cx) * (c - cx) + (r - cy) * (r - cy)) /
                            (radius * radius);
          plane(r, c) =
              clip_to_byte(round_half_away(base + amp * std::exp(-d2)));
        }
      }
      break;
    }
    default: {  // two flat bands, a soft step edge
      const auto a = static_cast<std::uint8_t>(rng.next_range(16, 120));
      const auto b = static_cast<std::uint8_t>(rng.next_range(136, 240));
      const int split = static_cast<int>(rng.next_range(height / 4,
                                                        3 * height / 4));
      for (int r = 0; r < height; ++r) {
        plane.row(r).setConstant(r < split ? a : b);
      }
      break;
    }
  }
  return plane;
}

}  // namespace grainkit
