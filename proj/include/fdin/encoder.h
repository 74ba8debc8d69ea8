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

#ifndef FDIN_ENCODER_H_
#define FDIN_ENCODER_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fdin/layers.h"

namespace fdin {

// y = ReLU(shortcut(x) + F(x)), F = conv -> norm -> ReLU -> conv -> norm.
// The shortcut is the identity when shapes match, else a strided 1x1x1
// projection.
template <typename T>
class ResBlock {
 public:
  ResBlock() = default;
  ResBlock(int in_channels, int out_channels, int spatial_stride);

  void Init(Rng& rng);
  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& x, bool training);
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  bool has_projection() const { return has_projection_; }
  Conv3d<T>& conv1() { return conv1_; }
  Conv3d<T>& conv2() { return conv2_; }
  Conv3d<T>& projection() { return projection_; }
  BatchNorm3d<T>& norm1() { return norm1_; }
  BatchNorm3d<T>& norm2() { return norm2_; }

 private:
  int in_channels_ = 0;
  bool has_projection_ = false;
  Conv3d<T> conv1_, conv2_, projection_;
  BatchNorm3d<T> norm1_, norm2_;
  Relu<T> relu1_, relu_out_;
};

struct EncoderConfig {
  int in_channels = 3;
  int stem_channels = 16;
  std::vector<int> stage_channels = {16, 32, 64, 128};
};

// Shallowest first; every level keeps T, each halves H and W.
template <typename T>
using FeaturePyramid = std::vector<Tensor<T>>;

// Stem conv-norm-ReLU, then per stage a stride-2 block and a stride-1 block.
template <typename T>
class Encoder {
 public:
  Encoder() = default;
  explicit Encoder(const EncoderConfig& config);

  void Init(Rng& rng);
  absl::StatusOr<FeaturePyramid<T>> Forward(const Tensor<T>& x, bool training);
  // `d_pyramid[i]` is the loss gradient at pyramid level i; empty entries
  // count as zero. Returns the input gradient.
  Tensor<T> Backward(const FeaturePyramid<T>& d_pyramid);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  const EncoderConfig& config() const { return config_; }
  int num_stages() const {
    return static_cast<int>(config_.stage_channels.size());
  }
  ResBlock<T>& down_block(int stage) { return down_[stage]; }
  ResBlock<T>& same_block(int stage) { return same_[stage]; }
  ConvNormRelu<T>& stem() { return stem_; }

 private:
  EncoderConfig config_;
  ConvNormRelu<T> stem_;
  std::vector<ResBlock<T>> down_, same_;
  std::vector<Shape> level_shapes_;
};

}  // namespace fdin

#endif  // FDIN_ENCODER_H_
