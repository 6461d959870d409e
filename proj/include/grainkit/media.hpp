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
#include <string>
#include <variant>
#include <vector>

namespace grainkit {

// 8-bit planar image data. A plane is a row-major Eigen matrix: rows() is
// the height, cols() the width.
using Plane =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FloatPlane =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 4:2:0 frame: chroma planes at ceil(luma/2) resolution.
struct Frame {
  Plane y;
  Plane cb;
  Plane cr;

  bool operator==(const Frame&) const = default;
};

// Round half away from zero, the rounding rule used throughout the toolkit.
inline int round_half_away(double v) {
  return static_cast<int>(v >= 0 ? std::floor(v + 0.5) : std::ceil(v - 0.5));
}
inline std::uint8_t clip_to_byte(int v) {
  return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

inline int chroma_dim(int luma_dim) { return (luma_dim + 1) / 2; }

// Gray frame with neutral chroma; useful for luma-only processing.
Frame frame_from_plane(const Plane& luma);

bool frame_dims_valid(const Frame& frame);

// ---------------------------------------------------------------------------
// Raw planar 4:2:0 (I420 order: Y, Cb, Cr). Dimensions are supplied by the
// caller; width and height must be even and the file size a whole number of
// frames.

std::size_t yuv420_frame_count(const std::string& path, int width, int height);
Frame read_yuv420(const std::string& path, int width, int height,
                  std::size_t frame_index);
void write_yuv420(const std::string& path, const std::vector<Frame>& frames);

// ---------------------------------------------------------------------------
// Binary PGM (P5) and PPM (P6), maxval 255. PPM converts to and from 4:2:0
// through the BT.709 full-range matrix; that conversion is the only lossy
// step.

Plane read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Plane& plane);

Frame read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Frame& frame);

// Reads either format by magic number: PGM yields a Plane, PPM a Frame.
std::variant<Plane, Frame> read_pnm(const std::string& path);

// Loads any supported image as a frame (PGM becomes a neutral-chroma frame).
Frame load_frame(const std::string& path);

}  // namespace grainkit
