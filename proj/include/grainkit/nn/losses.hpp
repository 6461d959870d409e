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

#include "grainkit/nn/tensor.hpp"

namespace grainkit::nn {

// Mean over rows of -log softmax(logits)[target]. logits is (N, K); one
// class index per row.
template <class S>
TensorPtr<S> softmax_cross_entropy(Tape<S>& tape, const TensorPtr<S>& logits,
                                   const std::vector<int>& targets) {
  if (logits->rank() != 2) {
    throw std::invalid_argument("softmax_cross_entropy: expected (N,K), got " +
                                logits->shape_str());
  }
  const int n = logits->dim(0), k = logits->dim(1);
  if (static_cast<int>(targets.size()) != n) {
    throw std::invalid_argument(
        "softmax_cross_entropy: " + std::to_string(targets.size()) +
        " targets for batch of " + std::to_string(n));
  }
  for (int t : targets) {
    if (t < 0 || t >= k) {
      throw std::out_of_range("softmax_cross_entropy: class " +
                              std::to_string(t) + " out of range [0," +
                              std::to_string(k) + ")");
    }
  }
  auto out = tape.activation({1});
  // Softmax probabilities are needed again in backward; keep them.
  auto probs = std::make_shared<typename Tensor<S>::Vec>(logits->values.size());
  S total = S(0);
  for (int r = 0; r < n; ++r) {
    const auto row = logits->values.segment(static_cast<long>(r) * k, k);
    const S max = row.maxCoeff();
    const S lse = max + std::log((row.array() - max).exp().sum());
    probs->segment(static_cast<long>(r) * k, k) =
        (row.array() - lse).exp().matrix();
    total += lse - row(targets[r]);
  }
  out->values(0) = total / S(n);
  tape.record([logits, out, probs, targets, n, k] {
    if (!logits->tracks_grad()) return;
    const S g = out->grad(0) / S(n);
    for (int r = 0; r < n; ++r) {
      auto grad_row = logits->grad.segment(static_cast<long>(r) * k, k);
      grad_row += g * probs->segment(static_cast<long>(r) * k, k);
      grad_row(targets[r]) -= g;
    }
  });
  return out;
}

// Mean over elements of exp(beta * |pred - target|) - 1; the kink at zero
// error takes subgradient 0.
template <class S>
TensorPtr<S> exp_l1_loss(Tape<S>& tape, const TensorPtr<S>& pred,
                         const TensorPtr<S>& target, S beta = S(5)) {
  require_same_shape(*pred, *target, "exp_l1_loss");
  auto out = tape.activation({1});
  const auto diff = (pred->values - target->values).eval();
  out->values(0) =
      ((diff.array().abs() * beta).exp() - S(1)).mean();
  tape.record([pred, target, out, beta] {
    if (!pred->tracks_grad()) return;
    const auto diff = (pred->values - target->values).array();
    const S g = out->grad(0) / S(pred->numel());
    pred->grad.array() += g * beta * diff.sign() * (diff.abs() * beta).exp();
  });
  return out;
}

// Mean over adjacent pairs of max(-(next - current), 0), evaluated per batch
// row of length row_len, then averaged over all pairs.
template <class S>
TensorPtr<S> monotonicity_loss(Tape<S>& tape, const TensorPtr<S>& pred,
                               int row_len) {
  if (pred->numel() % row_len != 0) {
    throw std::invalid_argument("monotonicity_loss: " + pred->shape_str() +
                                " not divisible into rows of " +
                                std::to_string(row_len));
  }
  if (row_len < 2) {
    throw std::invalid_argument(
        "monotonicity_loss: rows must have at least 2 elements");
  }
  const long rows = pred->numel() / row_len;
  const long pairs = rows * (row_len - 1);
  auto out = tape.activation({1});
  S total = S(0);
  for (long r = 0; r < rows; ++r) {
    const auto row = pred->values.segment(r * row_len, row_len);
    for (int i = 0; i + 1 < row_len; ++i) {
      total += std::max(-(row(i + 1) - row(i)), S(0));
    }
  }
  out->values(0) = total / S(pairs);
  tape.record([pred, out, row_len, rows, pairs] {
    if (!pred->tracks_grad()) return;
    const S g = out->grad(0) / S(pairs);
    for (long r = 0; r < rows; ++r) {
      const auto row = pred->values.segment(r * row_len, row_len);
      auto grad_row = pred->grad.segment(r * row_len, row_len);
      for (int i = 0; i + 1 < row_len; ++i) {
        if (row(i + 1) < row(i)) {
          grad_row(i) += g;
          grad_row(i + 1) -= g;
        }
      }
    }
  });
  return out;
}

// total = sum_i lambda_i * scalar_i.
template <class S>
TensorPtr<S> weighted_sum(Tape<S>& tape,
                          const std::vector<TensorPtr<S>>& scalars,
                          const std::vector<S>& lambdas) {
  if (scalars.size() != lambdas.size() || scalars.empty()) {
    throw std::invalid_argument("weighted_sum: need matching non-empty lists");
  }
  auto out = tape.activation({1});
  S total = S(0);
  for (size_t i = 0; i < scalars.size(); ++i) {
    if (scalars[i]->numel() != 1) {
      throw std::invalid_argument("weighted_sum: term " + std::to_string(i) +
                                  " is not scalar: " + scalars[i]->shape_str());
    }
    total += lambdas[i] * scalars[i]->values(0);
  }
  out->values(0) = total;
  tape.record([scalars, lambdas, out] {
    for (size_t i = 0; i < scalars.size(); ++i) {
      if (scalars[i]->tracks_grad()) {
        scalars[i]->grad(0) += lambdas[i] * out->grad(0);
      }
    }
  });
  return out;
}

}  // namespace grainkit::nn
