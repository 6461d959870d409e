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
#include <string>
#include <utility>
#include <vector>

#include "grainkit/fgc.hpp"
#include "grainkit/media.hpp"
#include "grainkit/nn/losses.hpp"
#include "grainkit/nn/ops.hpp"
#include "grainkit/nn/optim.hpp"

namespace grainkit {

enum class Variant : std::uint8_t { kLuma = 0, kChroma = 1 };

// Grain analyzer network: shared backbone (one 3x3 convolution, three
// residual blocks, global average pool) and four task heads of two linear
// layers each. Head widths follow the estimation difficulty of each task.
struct NetworkConfig {
  Variant variant = Variant::kLuma;
  int n_intervals = 16;
  int backbone_channels = 64;
  int log2_classes = 3;     // values log2_min .. log2_min+2
  int scaling_classes = 26; // multiples of 10 in 0..250
  int cutoff_classes = 12;
  int cutoff_min = 3;
  int log2_min = 3;
  int scale_step = 10;
  int hidden_log2 = 64;
  int hidden_scaling = 1024;
  int hidden_cutoff = 512;
  int hidden_intervals = 512;

  static NetworkConfig luma(int backbone_channels = 64);
  static NetworkConfig chroma(int backbone_channels = 64);

  bool operator==(const NetworkConfig&) const = default;
};

// Named parameter tensors in a fixed order; the order is the serialization
// order.
struct ModelWeights {
  NetworkConfig config;
  std::vector<std::pair<std::string, nn::TensorPtr<float>>> tensors;

  const nn::TensorPtr<float>& at(const std::string& name) const;
  std::vector<nn::TensorPtr<float>> parameters() const;
  long parameter_count() const;
};

ModelWeights build_network(const NetworkConfig& config, Rng& rng);

// Taped head outputs for training; shapes per sample: boundaries
// 2*n_intervals (sigmoid), scaling n_intervals*scaling_classes, cutoff
// n_intervals*cutoff_classes, log2 log2_classes.
template <class S>
struct HeadOutputs {
  nn::TensorPtr<S> boundaries;
  nn::TensorPtr<S> scaling_logits;
  nn::TensorPtr<S> cutoff_logits;
  nn::TensorPtr<S> log2_logits;
};

HeadOutputs<float> network_forward(nn::Tape<float>& tape,
                                   const ModelWeights& weights,
                                   const nn::TensorPtr<float>& input);

// Raw head outputs for one frame, ready for argmax/regression readout.
struct PredictionResult {
  Eigen::VectorXf boundaries;      // 2*n_intervals in [0,1]
  Eigen::MatrixXf scaling_logits;  // n_intervals x scaling_classes
  Eigen::MatrixXf cutoff_logits;   // n_intervals x cutoff_classes
  Eigen::VectorXf log2_logits;     // log2_classes
};

FloatPlane normalize_plane(const Plane& plane);  // pixel / 255

// Single-patch inference; the patch is a [0,1] normalized plane of any size
// (the pooled backbone is size-agnostic).
PredictionResult forward(const ModelWeights& weights, const FloatPlane& patch);

// ---------------------------------------------------------------------------
// Label encoding: boundaries [l1,u1,l2,u2,...]/255, scaling class s/10,
// cutoff class c - cutoff_min, log2 class L - log2_min. A bijection on the
// sampler's value grid.

struct TrainingLabels {
  Eigen::VectorXf boundaries;        // 2*n_intervals in [0,1]
  std::vector<int> scaling_classes;  // n_intervals
  std::vector<int> cutoff_classes;   // n_intervals
  int log2_class = 0;
};

TrainingLabels encode_labels(const ComponentModel& model,
                             int log2_scale_factor,
                             const NetworkConfig& config);
std::pair<ComponentModel, int> decode_labels(const TrainingLabels& labels,
                                             const NetworkConfig& config);

// ---------------------------------------------------------------------------
// Combined training objective:
//   lambda_cutoff * CE(cutoffs) + lambda_intervals * (expL1 + mono)(bounds)
//   + lambda_log2 * CE(log2) + lambda_scaling * CE(scaling)

struct LossWeights {
  float lambda_cutoff = 100.0f;
  float lambda_intervals = 1.0f;
  float lambda_log2 = 0.1f;
  float lambda_scaling = 100.0f;
  float beta = 5.0f;
};

struct LossBreakdown {
  double total = 0;
  double cutoff = 0;     // unweighted CE
  double intervals = 0;  // unweighted expL1 + mono
  double log2 = 0;
  double scaling = 0;
};

// Templated so the 64-bit shadow instantiation can verify the loss formulas;
// training uses S = float.
template <class S>
std::pair<nn::TensorPtr<S>, LossBreakdown> compute_loss(
    nn::Tape<S>& tape, const HeadOutputs<S>& pred,
    const std::vector<TrainingLabels>& targets, const LossWeights& weights,
    int n_intervals) {
  const int n = static_cast<int>(targets.size());
  if (n == 0) throw std::invalid_argument("compute_loss: empty batch");
  if (pred.boundaries->dim(0) != n) {
    throw std::invalid_argument("compute_loss: batch of " + std::to_string(n) +
                                " labels vs outputs " +
                                pred.boundaries->shape_str());
  }
  const int scaling_classes = pred.scaling_logits->dim(1) / n_intervals;
  const int cutoff_classes = pred.cutoff_logits->dim(1) / n_intervals;

  auto boundary_target = nn::make_tensor<S>({n, 2 * n_intervals});
  std::vector<int> scaling_targets, cutoff_targets, log2_targets;
  scaling_targets.reserve(static_cast<size_t>(n) * n_intervals);
  cutoff_targets.reserve(static_cast<size_t>(n) * n_intervals);
  log2_targets.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = targets[i];
    if (t.boundaries.size() != 2 * n_intervals ||
        static_cast<int>(t.scaling_classes.size()) != n_intervals ||
        static_cast<int>(t.cutoff_classes.size()) != n_intervals) {
      throw std::invalid_argument("compute_loss: label " + std::to_string(i) +
                                  " does not match " +
                                  std::to_string(n_intervals) + " intervals");
    }
    for (int j = 0; j < 2 * n_intervals; ++j) {
      boundary_target->values(static_cast<long>(i) * 2 * n_intervals + j) =
          static_cast<S>(t.boundaries(j));
    }
    scaling_targets.insert(scaling_targets.end(), t.scaling_classes.begin(),
                           t.scaling_classes.end());
    cutoff_targets.insert(cutoff_targets.end(), t.cutoff_classes.begin(),
                          t.cutoff_classes.end());
    log2_targets.push_back(t.log2_class);
  }

  auto cutoff_rows = nn::reshape(tape, pred.cutoff_logits,
                                 {n * n_intervals, cutoff_classes});
  auto scaling_rows = nn::reshape(tape, pred.scaling_logits,
                                  {n * n_intervals, scaling_classes});
  auto ce_cutoff = nn::softmax_cross_entropy(tape, cutoff_rows, cutoff_targets);
  auto ce_scaling =
      nn::softmax_cross_entropy(tape, scaling_rows, scaling_targets);
  auto ce_log2 =
      nn::softmax_cross_entropy(tape, pred.log2_logits, log2_targets);
  auto exp_l1 = nn::exp_l1_loss(tape, pred.boundaries, boundary_target,
                                static_cast<S>(weights.beta));
  auto mono = nn::monotonicity_loss(tape, pred.boundaries, 2 * n_intervals);

  auto total = nn::weighted_sum<S>(
      tape, {ce_cutoff, exp_l1, mono, ce_log2, ce_scaling},
      {static_cast<S>(weights.lambda_cutoff),
       static_cast<S>(weights.lambda_intervals),
       static_cast<S>(weights.lambda_intervals),
       static_cast<S>(weights.lambda_log2),
       static_cast<S>(weights.lambda_scaling)});

  LossBreakdown breakdown;
  breakdown.total = static_cast<double>(total->values(0));
  breakdown.cutoff = static_cast<double>(ce_cutoff->values(0));
  breakdown.intervals =
      static_cast<double>(exp_l1->values(0) + mono->values(0));
  breakdown.log2 = static_cast<double>(ce_log2->values(0));
  breakdown.scaling = static_cast<double>(ce_scaling->values(0));
  return {total, breakdown};
}

// ---------------------------------------------------------------------------
// Weights file: magic "FGAW", version u8=1, config block, then per tensor:
// name length u32, name bytes, rank u32, dims u32..., float32 values. All
// integers and floats little-endian.

void save_weights(const ModelWeights& weights, const std::string& path);
ModelWeights load_weights(const std::string& path);
// Loads and additionally refuses a file whose config differs from expected.
ModelWeights load_weights(const std::string& path,
                          const NetworkConfig& expected);

}  // namespace grainkit
