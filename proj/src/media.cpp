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

#include "grainkit/media.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace grainkit {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::runtime_error(message);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot open " + path + " for writing");
  return out;
}

void read_exact(std::ifstream& in, void* dst, std::size_t n,
                const std::string& what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  require(static_cast<std::size_t>(in.gcount()) == n,
          "short read while loading " + what);
}

}  // namespace

Frame frame_from_plane(const Plane& luma) {
  Frame frame;
  frame.y = luma;
  frame.cb = Plane::Constant(chroma_dim(static_cast<int>(luma.rows())),
                             chroma_dim(static_cast<int>(luma.cols())), 128);
  frame.cr = frame.cb;
  return frame;
}

bool frame_dims_valid(const Frame& frame) {
  return frame.cb.rows() == chroma_dim(static_cast<int>(frame.y.rows())) &&
         frame.cb.cols() == chroma_dim(static_cast<int>(frame.y.cols())) &&
         frame.cr.rows() == frame.cb.rows() &&
         frame.cr.cols() == frame.cb.cols();
}

// ---------------------------------------------------------------------------
// Raw YUV 4:2:0

namespace {

std::size_t yuv420_frame_bytes(int width, int height) {
  return static_cast<std::size_t>(width) * height * 3 / 2;
}

void check_yuv_dims(int width, int height) {
  require(width > 0 && height > 0, "frame dimensions must be positive");
  require(width % 2 == 0 && height % 2 == 0,
          "4:2:0 frame dimensions must be even, got " + std::to_string(width) +
              "x" + std::to_string(height));
}

}  // namespace

std::size_t yuv420_frame_count(const std::string& path, int width,
                               int height) {
  check_yuv_dims(width, height);
  const auto size = std::filesystem::file_size(path);
  const auto frame_bytes = yuv420_frame_bytes(width, height);
  require(size % frame_bytes == 0,
          path + ": file size " + std::to_string(size) +
              " is not a multiple of the " + std::to_string(frame_bytes) +
              "-byte frame size for " + std::to_string(width) + "x" +
              std::to_string(height));
  return size / frame_bytes;
}

Frame read_yuv420(const std::string& path, int width, int height,
                  std::size_t frame_index) {
  const std::size_t frames = yuv420_frame_count(path, width, height);
  require(frame_index < frames,
          path + ": frame index " + std::to_string(frame_index) +
              " out of range, file holds " + std::to_string(frames));
  auto in = open_input(path);
  in.seekg(static_cast<std::streamoff>(frame_index *
                                       yuv420_frame_bytes(width, height)));
  Frame frame;
  frame.y.resize(height, width);
  frame.cb.resize(height / 2, width / 2);
  frame.cr.resize(height / 2, width / 2);
  read_exact(in, frame.y.data(), frame.y.size(), path + " (Y)");
  read_exact(in, frame.cb.data(), frame.cb.size(), path + " (Cb)");
  read_exact(in, frame.cr.data(), frame.cr.size(), path + " (Cr)");
  return frame;
}

void write_yuv420(const std::string& path, const std::vector<Frame>& frames) {
  auto out = open_output(path);
  for (const auto& frame : frames) {
    check_yuv_dims(static_cast<int>(frame.y.cols()),
                   static_cast<int>(frame.y.rows()));
    require(frame_dims_valid(frame), "chroma planes are not 4:2:0 sized");
    out.write(reinterpret_cast<const char*>(frame.y.data()), frame.y.size());
    out.write(reinterpret_cast<const char*>(frame.cb.data()), frame.cb.size());
    out.write(reinterpret_cast<const char*>(frame.cr.data()), frame.cr.size());
  }
  require(static_cast<bool>(out), "write failed: " + path);
}

// ---------------------------------------------------------------------------
// PGM / PPM

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::ifstream& in, const std::string& path) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  require(!token.empty(), path + ": malformed header (unexpected end)");
  return token;
}

int pnm_int(std::ifstream& in, const std::string& path) {
  const std::string token = pnm_token(in, path);
  try {
    size_t used = 0;
    const int value = std::stoi(token, &used);
    require(used == token.size() && value > 0,
            path + ": malformed header token \"" + token + "\"");
    return value;
  } catch (const std::invalid_argument&) {
    throw std::runtime_error(path + ": malformed header token \"" + token +
                             "\"");
  }
}

struct PnmHeader {
  std::string magic;
  int width;
  int height;
};

PnmHeader read_pnm_header(std::ifstream& in, const std::string& path) {
  PnmHeader h;
  h.magic = pnm_token(in, path);
  require(h.magic == "P5" || h.magic == "P6",
          path + ": unsupported magic \"" + h.magic + "\"");
  h.width = pnm_int(in, path);
  h.height = pnm_int(in, path);
  const int maxval = pnm_int(in, path);
  require(maxval == 255, path + ": maxval must be 255, got " +
                             std::to_string(maxval));
  return h;
}

// BT.709 full-range analysis/synthesis coefficients.
constexpr double kKr = 0.2126;
constexpr double kKb = 0.0722;
constexpr double kKg = 1.0 - kKr - kKb;
constexpr double kCbDiv = 2.0 * (1.0 - kKb);  // 1.8556
constexpr double kCrDiv = 2.0 * (1.0 - kKr);  // 1.5748

}  // namespace

Plane read_pgm(const std::string& path) {
  auto in = open_input(path);
  const PnmHeader h = read_pnm_header(in, path);
  require(h.magic == "P5", path + ": expected PGM (P5), got " + h.magic);
  Plane plane(h.height, h.width);
  read_exact(in, plane.data(), plane.size(), path);
  return plane;
}

void write_pgm(const std::string& path, const Plane& plane) {
  auto out = open_output(path);
  out << "P5\n" << plane.cols() << " " << plane.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(plane.data()), plane.size());
  require(static_cast<bool>(out), "write failed: " + path);
}

Frame read_ppm(const std::string& path) {
  auto in = open_input(path);
  const PnmHeader h = read_pnm_header(in, path);
  require(h.magic == "P6", path + ": expected PPM (P6), got " + h.magic);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(h.width) * h.height *
                                3);
  read_exact(in, rgb.data(), rgb.size(), path);

  Frame frame;
  frame.y.resize(h.height, h.width);
  const int ch = chroma_dim(h.height), cw = chroma_dim(h.width);
  frame.cb.resize(ch, cw);
  frame.cr.resize(ch, cw);

  // Full-resolution chroma first, then 2x2 box average down to 4:2:0.
  Eigen::MatrixXd cb_full(h.height, h.width), cr_full(h.height, h.width);
  for (int r = 0; r < h.height; ++r) {
    for (int c = 0; c < h.width; ++c) {
      const std::size_t idx = (static_cast<std::size_t>(r) * h.width + c) * 3;
      const double R = rgb[idx], G = rgb[idx + 1], B = rgb[idx + 2];
      const double y = kKr * R + kKg * G + kKb * B;
      frame.y(r, c) = clip_to_byte(round_half_away(y));
      cb_full(r, c) = (B - y) / kCbDiv + 128.0;
      cr_full(r, c) = (R - y) / kCrDiv + 128.0;
    }
  }
  for (int r = 0; r < ch; ++r) {
    for (int c = 0; c < cw; ++c) {
      const int r0 = 2 * r, c0 = 2 * c;
      const int r1 = std::min(r0 + 1, h.height - 1);
      const int c1 = std::min(c0 + 1, h.width - 1);
      const double cb = (cb_full(r0, c0) + cb_full(r0, c1) + cb_full(r1, c0) +
                         cb_full(r1, c1)) /
                        4.0;
      const double cr = (cr_full(r0, c0) + cr_full(r0, c1) + cr_full(r1, c0) +
                         cr_full(r1, c1)) /
                        4.0;
      frame.cb(r, c) = clip_to_byte(round_half_away(cb));
      frame.cr(r, c) = clip_to_byte(round_half_away(cr));
    }
  }
  return frame;
}

void write_ppm(const std::string& path, const Frame& frame) {
  require(frame_dims_valid(frame), "chroma planes are not 4:2:0 sized");
  const int height = static_cast<int>(frame.y.rows());
  const int width = static_cast<int>(frame.y.cols());
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double y = frame.y(r, c);
      const double cb = frame.cb(r / 2, c / 2) - 128.0;  // nearest upsample
      const double cr = frame.cr(r / 2, c / 2) - 128.0;
      const double R = y + kCrDiv * cr;
      const double B = y + kCbDiv * cb;
      const double G = (y - kKr * R - kKb * B) / kKg;
      const std::size_t idx = (static_cast<std::size_t>(r) * width + c) * 3;
      rgb[idx] = clip_to_byte(round_half_away(R));
      rgb[idx + 1] = clip_to_byte(round_half_away(G));
      rgb[idx + 2] = clip_to_byte(round_half_away(B));
    }
  }
  auto out = open_output(path);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
  require(static_cast<bool>(out), "write failed: " + path);
}

std::variant<Plane, Frame> read_pnm(const std::string& path) {
  {
    auto in = open_input(path);
    const std::string magic = pnm_token(in, path);
    if (magic == "P6") return read_ppm(path);
    require(magic == "P5", path + ": unsupported magic \"" + magic + "\"");
  }
  return read_pgm(path);
}

Frame load_frame(const std::string& path) {
  auto image = read_pnm(path);
  if (std::holds_alternative<Frame>(image)) return std::get<Frame>(image);
  return frame_from_plane(std::get<Plane>(image));
}

}  // namespace grainkit
