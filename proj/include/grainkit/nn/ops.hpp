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

// Layout convention: activations are NCHW, weights are (out, in, kh, kw) for
// convolutions and (out, in) for linear layers, all flattened row-major.

namespace detail {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;
template <class S>
using MutRowMajorMap =
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;

// Gathers 3x3-style patches into columns of a (N*Ho*Wo, Cin*kh*kw) matrix.
// Each (ci,ky,kx) column is a shifted copy of the input plane, so writes are
// contiguous row runs.
template <class S>
void im2col(const Tensor<S>& x, int kh, int kw, int stride, int pad,
            int out_h, int out_w, MatX<S>& col) {
  const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const long patches = static_cast<long>(n) * out_h * out_w;
  col.setZero(patches, static_cast<long>(cin) * kh * kw);
  for (int sample = 0; sample < n; ++sample) {
    const S* x_base = x.values.data() +
                      static_cast<long>(sample) * cin * h * w;
    const long row0 = static_cast<long>(sample) * out_h * out_w;
    for (int ci = 0; ci < cin; ++ci) {
      const S* plane = x_base + static_cast<long>(ci) * h * w;
      for (int ky = 0; ky < kh; ++ky) {
        for (int kx = 0; kx < kw; ++kx) {
          S* dst = col.data() +
                   (static_cast<long>(ci) * kh * kw + ky * kw + kx) *
                       col.rows();
          for (int oy = 0; oy < out_h; ++oy) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            S* run = dst + row0 + static_cast<long>(oy) * out_w;
            const S* src = plane + static_cast<long>(iy) * w;
            if (stride == 1) {
              const int ox_lo = std::max(0, pad - kx);
              const int ox_hi = std::min(out_w, w + pad - kx);
              for (int ox = ox_lo; ox < ox_hi; ++ox) {
                run[ox] = src[ox + kx - pad];
              }
            } else {
              for (int ox = 0; ox < out_w; ++ox) {
                const int ix = ox * stride + kx - pad;
                if (ix >= 0 && ix < w) run[ox] = src[ix];
              }
            }
          }
        }
      }
    }
  }
}

// Scatter-adds column gradients back onto the input gradient (adjoint of
// im2col).
template <class S>
void col2im_add(const MatX<S>& col, int kh, int kw, int stride, int pad,
                int out_h, int out_w, Tensor<S>& x) {
  const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  for (int sample = 0; sample < n; ++sample) {
    S* x_base = x.grad.data() + static_cast<long>(sample) * cin * h * w;
    const long row0 = static_cast<long>(sample) * out_h * out_w;
    for (int ci = 0; ci < cin; ++ci) {
      S* plane = x_base + static_cast<long>(ci) * h * w;
      for (int ky = 0; ky < kh; ++ky) {
        for (int kx = 0; kx < kw; ++kx) {
          const S* src_col = col.data() +
                             (static_cast<long>(ci) * kh * kw + ky * kw + kx) *
                                 col.rows();
          for (int oy = 0; oy < out_h; ++oy) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            const S* run = src_col + row0 + static_cast<long>(oy) * out_w;
            S* dst = plane + static_cast<long>(iy) * w;
            for (int ox = 0; ox < out_w; ++ox) {
              const int ix = ox * stride + kx - pad;
              if (ix >= 0 && ix < w) dst[ix] += run[ox];
            }
          }
        }
      }
    }
  }
}

}  // namespace detail

// 2-D convolution, NCHW. Forward and both backward passes are im2col-backed
// matrix products; the patch matrix is recomputed in backward instead of
// kept alive on the tape.
template <class S>
TensorPtr<S> conv2d(Tape<S>& tape, const TensorPtr<S>& x,
                    const TensorPtr<S>& w, const TensorPtr<S>& b, int stride,
                    int pad) {
  if (x->rank() != 4 || w->rank() != 4) {
    throw std::invalid_argument("conv2d: expected NCHW input " +
                                x->shape_str() + " and OIHW weight " +
                                w->shape_str());
  }
  if (x->dim(1) != w->dim(1)) {
    throw std::invalid_argument("conv2d: input channels " + x->shape_str() +
                                " do not match weight " + w->shape_str());
  }
  if (b->rank() != 1 || b->dim(0) != w->dim(0)) {
    throw std::invalid_argument("conv2d: bias " + b->shape_str() +
                                " does not match weight " + w->shape_str());
  }
  if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
  const int n = x->dim(0), h = x->dim(2), width = x->dim(3);
  const int cout = w->dim(0), kh = w->dim(2), kw = w->dim(3);
  const int out_h = (h + 2 * pad - kh) / stride + 1;
  const int out_w = (width + 2 * pad - kw) / stride + 1;
  if (out_h <= 0 || out_w <= 0) {
    throw std::invalid_argument("conv2d: kernel " + w->shape_str() +
                                " does not fit input " + x->shape_str());
  }
  const long k = static_cast<long>(x->dim(1)) * kh * kw;
  const long patches = static_cast<long>(n) * out_h * out_w;

  auto out = tape.activation({n, cout, out_h, out_w});
  {
    detail::MatX<S> col;
    detail::im2col(*x, kh, kw, stride, pad, out_h, out_w, col);
    detail::RowMajorMap<S> wm(w->values.data(), cout, k);
    detail::MatX<S> y = col * wm.transpose();  // (patches, cout)
    y.rowwise() += b->values.transpose();
    for (int sample = 0; sample < n; ++sample) {
      for (int c = 0; c < cout; ++c) {
        Eigen::Map<typename Tensor<S>::Vec>(
            out->values.data() +
                (static_cast<long>(sample) * cout + c) * out_h * out_w,
            static_cast<long>(out_h) * out_w) =
            y.col(c).segment(static_cast<long>(sample) * out_h * out_w,
                             static_cast<long>(out_h) * out_w);
      }
    }
  }

  tape.record([x, w, b, out, stride, pad, n, cout, kh, kw, out_h, out_w, k,
               patches] {
    detail::MatX<S> dy(patches, cout);
    for (int sample = 0; sample < n; ++sample) {
      for (int c = 0; c < cout; ++c) {
        dy.col(c).segment(static_cast<long>(sample) * out_h * out_w,
                          static_cast<long>(out_h) * out_w) =
            Eigen::Map<const typename Tensor<S>::Vec>(
                out->grad.data() +
                    (static_cast<long>(sample) * cout + c) * out_h * out_w,
                static_cast<long>(out_h) * out_w);
      }
    }
    if (b->tracks_grad()) b->grad += dy.colwise().sum().transpose();
    if (w->tracks_grad()) {
      detail::MatX<S> col;
      detail::im2col(*x, kh, kw, stride, pad, out_h, out_w, col);
      detail::MutRowMajorMap<S> dwm(w->grad.data(), cout, k);
      dwm.noalias() += dy.transpose() * col;
    }
    if (x->tracks_grad()) {
      detail::RowMajorMap<S> wm(w->values.data(), cout, k);
      detail::MatX<S> dcol = dy * wm;  // (patches, k)
      detail::col2im_add(dcol, kh, kw, stride, pad, out_h, out_w, *x);
    }
  });
  return out;
}

template <class S>
TensorPtr<S> relu(Tape<S>& tape, const TensorPtr<S>& x) {
  auto out = tape.activation(x->shape);
  out->values = x->values.cwiseMax(S(0));
  tape.record([x, out] {
    if (!x->tracks_grad()) return;
    x->grad.array() +=
        out->grad.array() * (x->values.array() > S(0)).template cast<S>();
  });
  return out;
}

template <class S>
TensorPtr<S> sigmoid(Tape<S>& tape, const TensorPtr<S>& x) {
  auto out = tape.activation(x->shape);
  out->values = (S(1) / (S(1) + (-x->values.array()).exp())).matrix();
  tape.record([x, out] {
    if (!x->tracks_grad()) return;
    x->grad.array() += out->grad.array() * out->values.array() *
                       (S(1) - out->values.array());
  });
  return out;
}

template <class S>
TensorPtr<S> add(Tape<S>& tape, const TensorPtr<S>& a, const TensorPtr<S>& b) {
  require_same_shape(*a, *b, "add");
  auto out = tape.activation(a->shape);
  out->values = a->values + b->values;
  tape.record([a, b, out] {
    if (a->tracks_grad()) a->grad += out->grad;
    if (b->tracks_grad()) b->grad += out->grad;
  });
  return out;
}

// Global average pool to N x C x 1 x 1.
template <class S>
TensorPtr<S> adaptive_avg_pool(Tape<S>& tape, const TensorPtr<S>& x) {
  if (x->rank() != 4) {
    throw std::invalid_argument("adaptive_avg_pool: expected NCHW, got " +
                                x->shape_str());
  }
  const int n = x->dim(0), c = x->dim(1);
  const long hw = static_cast<long>(x->dim(2)) * x->dim(3);
  auto out = tape.activation({n, c, 1, 1});
  for (long i = 0; i < static_cast<long>(n) * c; ++i) {
    out->values(i) = x->values.segment(i * hw, hw).mean();
  }
  tape.record([x, out, hw] {
    if (!x->tracks_grad()) return;
    const long planes = x->numel() / hw;
    for (long i = 0; i < planes; ++i) {
      x->grad.segment(i * hw, hw).array() += out->grad(i) / S(hw);
    }
  });
  return out;
}

// Shape change without data movement semantics; gradients pass through.
template <class S>
TensorPtr<S> reshape(Tape<S>& tape, const TensorPtr<S>& x,
                     std::vector<int> shape) {
  auto out = tape.activation(std::move(shape));
  if (out->numel() != x->numel()) {
    throw std::invalid_argument("reshape: element count mismatch " +
                                x->shape_str() + " vs " + out->shape_str());
  }
  out->values = x->values;
  tape.record([x, out] {
    if (x->tracks_grad()) x->grad += out->grad;
  });
  return out;
}

// Fully connected layer: x (N, in) * w (out, in)^T + b.
template <class S>
TensorPtr<S> linear(Tape<S>& tape, const TensorPtr<S>& x,
                    const TensorPtr<S>& w, const TensorPtr<S>& b) {
  if (x->rank() != 2 || w->rank() != 2) {
    throw std::invalid_argument("linear: expected 2-d input " +
                                x->shape_str() + " and weight " +
                                w->shape_str());
  }
  if (x->dim(1) != w->dim(1)) {
    throw std::invalid_argument("linear: input " + x->shape_str() +
                                " does not match weight " + w->shape_str());
  }
  if (b->rank() != 1 || b->dim(0) != w->dim(0)) {
    throw std::invalid_argument("linear: bias " + b->shape_str() +
                                " does not match weight " + w->shape_str());
  }
  const int n = x->dim(0), in = x->dim(1), out_dim = w->dim(0);
  auto out = tape.activation({n, out_dim});
  detail::RowMajorMap<S> xm(x->values.data(), n, in);
  detail::RowMajorMap<S> wm(w->values.data(), out_dim, in);
  detail::MutRowMajorMap<S> ym(out->values.data(), n, out_dim);
  ym.noalias() = xm * wm.transpose();
  ym.rowwise() += b->values.transpose();
  tape.record([x, w, b, out, n, in, out_dim] {
    detail::RowMajorMap<S> dym(out->grad.data(), n, out_dim);
    if (b->tracks_grad()) b->grad += dym.colwise().sum().transpose();
    if (w->tracks_grad()) {
      detail::RowMajorMap<S> xm(x->values.data(), n, in);
      detail::MutRowMajorMap<S> dwm(w->grad.data(), out_dim, in);
      dwm.noalias() += dym.transpose() * xm;
    }
    if (x->tracks_grad()) {
      detail::RowMajorMap<S> wm(w->values.data(), out_dim, in);
      detail::MutRowMajorMap<S> dxm(x->grad.data(), n, in);
      dxm.noalias() += dym * wm;
    }
  });
  return out;
}

// Two channel-preserving 3x3 convolutions with an identity skip:
// relu(conv2(relu(conv1(x))) + x).
template <class S>
struct ResidualBlockWeights {
  TensorPtr<S> conv1_w, conv1_b, conv2_w, conv2_b;
};

template <class S>
TensorPtr<S> residual_block(Tape<S>& tape, const TensorPtr<S>& x,
                            const ResidualBlockWeights<S>& weights) {
  auto h1 = relu(tape, conv2d(tape, x, weights.conv1_w, weights.conv1_b, 1, 1));
  auto h2 = conv2d(tape, h1, weights.conv2_w, weights.conv2_b, 1, 1);
  return relu(tape, add(tape, h2, x));
}

}  // namespace grainkit::nn
