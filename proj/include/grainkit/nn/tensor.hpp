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
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace grainkit::nn {

// Dense n-dimensional array with an optional same-shape gradient buffer.
// Training runs on float; tests instantiate double for finite-difference
// shadow checks.
template <class S>
struct Tensor {
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  std::vector<int> shape;
  Vec values;
  Vec grad;  // size 0 when gradients are not tracked
  bool requires_grad = false;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
    Tensor t;
    t.shape = std::move(shape);
    long n = 1;
    for (int d : t.shape) {
      if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
      n *= d;
    }
    t.values = Vec::Zero(n);
    t.requires_grad = requires_grad;
    if (requires_grad) t.grad = Vec::Zero(n);
    return t;
  }

  long numel() const { return values.size(); }
  int dim(int i) const { return shape.at(i); }
  int rank() const { return static_cast<int>(shape.size()); }
  bool tracks_grad() const { return grad.size() > 0; }
  void zero_grad() {
    if (grad.size() > 0) grad.setZero();
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape.size(); ++i) {
      os << (i ? "," : "") << shape[i];
    }
    os << ")";
    return os.str();
  }
};

template <class S>
using TensorPtr = std::shared_ptr<Tensor<S>>;

template <class S>
TensorPtr<S> make_tensor(std::vector<int> shape, bool requires_grad = false) {
  return std::make_shared<Tensor<S>>(
      Tensor<S>::zeros(std::move(shape), requires_grad));
}

template <class S>
void require_same_shape(const Tensor<S>& a, const Tensor<S>& b,
                        const char* op) {
  if (a.shape != b.shape) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

// Execution-ordered record of differentiable operations. Ops append one
// backward closure each; backward() replays them in reverse, which visits
// every node exactly once in reverse topological order.
template <class S>
class Tape {
 public:
  // Tracked intermediate: always carries a gradient buffer so upstream ops
  // can accumulate into it.
  TensorPtr<S> activation(std::vector<int> shape) {
    return make_tensor<S>(std::move(shape), /*requires_grad=*/true);
  }

  void record(std::function<void()> backward_fn) {
    nodes_.push_back(std::move(backward_fn));
  }

  // Seeds d(loss)/d(loss) = 1 and propagates. The loss must be scalar.
  void backward(const TensorPtr<S>& loss) {
    if (loss->numel() != 1) {
      throw std::invalid_argument("backward: loss must be scalar, got " +
                                  loss->shape_str());
    }
    if (!loss->tracks_grad()) {
      throw std::invalid_argument("backward: loss does not track gradients");
    }
    loss->grad(0) += S(1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<std::function<void()>> nodes_;
};

}  // namespace grainkit::nn
