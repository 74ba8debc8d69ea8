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

#ifndef FDIN_DECODER_H_
#define FDIN_DECODER_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fdin/encoder.h"
#include "fdin/layers.h"
#include "fdin/video_data.h"

namespace fdin {

// Top-down mask refinement. From the deepest features, each stage upsamples
// x2 (nearest), concatenates the matching pyramid level and applies
// conv-norm-ReLU; a final x2 upsample and 1-channel conv give logits at
// frame resolution.
template <typename T>
class Decoder {
 public:
  Decoder() = default;
  // `pyramid_channels`: encoder stage widths, shallowest first.
  explicit Decoder(const std::vector<int>& pyramid_channels);

  void Init(Rng& rng);
  // Returns (N, 1, T, 2*H0, 2*W0) logits, H0 x W0 the shallowest level.
  absl::StatusOr<Tensor<T>> Forward(const FeaturePyramid<T>& pyramid,
                                    const Tensor<T>& deepest, bool training);

  struct Gradients {
    Tensor<T> d_deepest;
    FeaturePyramid<T> d_pyramid;  // deepest entry left empty
  };
  Gradients Backward(const Tensor<T>& dlogits);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  ConvNormRelu<T>& merge(int level) { return merges_[level]; }
  Conv3d<T>& head() { return head_; }
  int num_levels() const { return static_cast<int>(channels_.size()); }

 private:
  std::vector<int> channels_;
  std::vector<ConvNormRelu<T>> merges_;  // merges_[j] outputs level j width
  Conv3d<T> head_;
};

// (T, 1, H, W) logits for one clip or window.
struct LogitMask {
  Tensor<float> logits;
};

// 1 where sigmoid(logit) >= threshold.
MaskSequence Binarize(const LogitMask& logits, double threshold);

}  // namespace fdin

#endif  // FDIN_DECODER_H_
