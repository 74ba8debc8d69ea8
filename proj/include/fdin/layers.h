/* Copyright 2026 The FDIN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FDIN_LAYERS_H_
#define FDIN_LAYERS_H_

#include <string>
#include <vector>

#include "fdin/rng.h"
#include "fdin/tensor.h"

namespace fdin {

// Learnable tensor with its accumulated gradient.
template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;

  void Reset(Shape shape) {
    value = Tensor<T>(shape);
    grad = Tensor<T>(std::move(shape));
  }
  void ZeroGrad() { grad.Fill(T(0)); }
};

template <typename T>
struct NamedParam {
  std::string name;
  Param<T>* param;
};

template <typename T>
struct NamedBuffer {
  std::string name;
  Tensor<T>* tensor;
};

// Flat view over a module tree: learnable parameters plus non-learnable
// state (normalization statistics), in a fixed traversal order.
template <typename T>
struct ParamSet {
  std::vector<NamedParam<T>> params;
  std::vector<NamedBuffer<T>> buffers;

  void ZeroGrad() {
    for (auto& p : params) p.param->ZeroGrad();
  }
};

struct ConvSpec {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;          // cubic kernel, same padding
  int spatial_stride = 1;  // temporal stride is always 1
  bool bias = false;
};

// 3D convolution over (N, C, T, H, W) with same padding, via im2col + GEMM
// over column panels.
template <typename T>
class Conv3d {
 public:
  Conv3d() = default;
  explicit Conv3d(const ConvSpec& spec);

  // He-normal weights, zero bias.
  void Init(Rng& rng);
  Shape OutputShape(const Shape& input) const;
  Tensor<T> Forward(const Tensor<T>& x);
  // Accumulates parameter gradients and returns the input gradient.
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  const ConvSpec& spec() const { return spec_; }
  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  struct Geometry {
    int t, h, w, ho, wo;
  };
  // Output columns [j0, j1) of the flattened (T, Ho, Wo) grid.
  void Im2Col(const T* x, const Geometry& g, int64_t j0, int64_t j1,
              T* cols) const;
  void Col2Im(const T* cols, const Geometry& g, int64_t j0, int64_t j1,
              T* dx) const;

  ConvSpec spec_;
  Param<T> weight_;  // (out, in, k, k, k)
  Param<T> bias_;    // (out)
  Tensor<T> input_;
};

// Per-channel normalization over (N, T, H, W).
template <typename T>
class BatchNorm3d {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm3d() = default;
  explicit BatchNorm3d(int channels);

  Tensor<T> Forward(const Tensor<T>& x, bool training);
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  Param<T>& gamma() { return gamma_; }
  Param<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

 private:
  int channels_ = 0;
  Param<T> gamma_, beta_;
  Tensor<T> running_mean_, running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
  bool last_training_ = true;
};

template <typename T>
class Relu {
 public:
  Tensor<T> Forward(const Tensor<T>& x);
  Tensor<T> Backward(const Tensor<T>& dy) const;

 private:
  Tensor<T> output_;
};

// conv -> norm -> ReLU, the recurring unit of the LFU and the decoder.
template <typename T>
class ConvNormRelu {
 public:
  ConvNormRelu() = default;
  explicit ConvNormRelu(const ConvSpec& spec)
      : conv_(spec), norm_(spec.out_channels) {}

  void Init(Rng& rng) { conv_.Init(rng); }
  Tensor<T> Forward(const Tensor<T>& x, bool training) {
    return relu_.Forward(norm_.Forward(conv_.Forward(x), training));
  }
  Tensor<T> Backward(const Tensor<T>& dy) {
    return conv_.Backward(norm_.Backward(relu_.Backward(dy)));
  }
  void Collect(const std::string& prefix, ParamSet<T>* set) {
    conv_.Collect(prefix + ".conv", set);
    norm_.Collect(prefix + ".norm", set);
  }

  Conv3d<T>& conv() { return conv_; }
  BatchNorm3d<T>& norm() { return norm_; }

 private:
  Conv3d<T> conv_;
  BatchNorm3d<T> norm_;
  Relu<T> relu_;
};

// Nearest-neighbor x2 over H and W of an (N, C, T, H, W) tensor.
template <typename T>
Tensor<T> Upsample2x(const Tensor<T>& x);
template <typename T>
Tensor<T> Upsample2xBackward(const Tensor<T>& dy);

}  // namespace fdin

#endif  // FDIN_LAYERS_H_
