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

#include <cmath>

#include "grainkit/nn/tensor.hpp"
#include "grainkit/rng.hpp"

namespace grainkit::nn {

// Normal(0, sqrt(2/fan_in)) initialisation.
template <class S>
TensorPtr<S> he_init(std::vector<int> shape, int fan_in, Rng& rng) {
  if (fan_in <= 0) {
    throw std::invalid_argument("he_init: fan_in must be positive");
  }
  auto t = make_tensor<S>(std::move(shape), /*requires_grad=*/true);
  const double std_dev = std::sqrt(2.0 / fan_in);
  for (long i = 0; i < t->numel(); ++i) {
    t->values(i) = static_cast<S>(rng.next_normal() * std_dev);
  }
  return t;
}

// Bias-corrected Adam with per-parameter moment buffers.
template <class S>
struct AdamState {
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S epsilon = S(1e-8);
  S learning_rate = S(5e-4);
  long step_count = 0;
  std::vector<typename Tensor<S>::Vec> m;
  std::vector<typename Tensor<S>::Vec> v;

  void init(const std::vector<TensorPtr<S>>& params) {
    m.clear();
    v.clear();
    for (const auto& p : params) {
      m.push_back(Tensor<S>::Vec::Zero(p->numel()));
      v.push_back(Tensor<S>::Vec::Zero(p->numel()));
    }
    step_count = 0;
  }
};

template <class S>
void adam_step(const std::vector<TensorPtr<S>>& params, AdamState<S>& state) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument(
        "adam_step: state not initialised for these parameters");
  }
  ++state.step_count;
  const S bc1 = S(1) - std::pow(state.beta1, S(state.step_count));
  const S bc2 = S(1) - std::pow(state.beta2, S(state.step_count));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    if (!p.tracks_grad()) {
      throw std::invalid_argument("adam_step: parameter " + std::to_string(i) +
                                  " has no gradient buffer");
    }
    state.m[i] = state.beta1 * state.m[i] + (S(1) - state.beta1) * p.grad;
    state.v[i].array() = state.beta2 * state.v[i].array() +
                         (S(1) - state.beta2) * p.grad.array().square();
    p.values.array() -= state.learning_rate * (state.m[i].array() / bc1) /
                        ((state.v[i].array() / bc2).sqrt() + state.epsilon);
  }
}

}  // namespace grainkit::nn
