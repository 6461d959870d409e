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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

// Scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("grainkit_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

// Independent direct-summation orthonormal DCT-II used as the spectral
// oracle. Deliberately not the matrix-product route the library uses.
inline Eigen::MatrixXd reference_dct2(const Eigen::MatrixXd& block) {
  const int n = static_cast<int>(block.rows());
  const int m = static_cast<int>(block.cols());
  Eigen::MatrixXd out(n, m);
  for (int kr = 0; kr < n; ++kr) {
    for (int kc = 0; kc < m; ++kc) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) {
          acc += block(r, c) * std::cos(M_PI * (2 * r + 1) * kr / (2.0 * n)) *
                 std::cos(M_PI * (2 * c + 1) * kc / (2.0 * m));
        }
      }
      const double sr = std::sqrt((kr == 0 ? 1.0 : 2.0) / n);
      const double sc = std::sqrt((kc == 0 ? 1.0 : 2.0) / m);
      out(kr, kc) = sr * sc * acc;
    }
  }
  return out;
}

}  // namespace testutil
