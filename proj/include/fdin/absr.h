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

#ifndef FDIN_ABSR_H_
#define FDIN_ABSR_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "fdin/layers.h"
#include "fdin/video_data.h"

namespace fdin {

// Adaptive band selection: each (H, W) plane is taken to the DCT domain,
// scaled elementwise by a learnable matrix L, and transformed back.
template <typename T>
class Absr {
 public:
  Absr() = default;
  // `mask_channels` is 1 (one L shared by all channels and frames) or the
  // input channel count (per-channel variant).
  Absr(int height, int width, int mask_channels = 1);

  // L ~ U[0, 1] i.i.d. from `rng`.
  void Init(Rng& rng);

  // x: (N, C, T, H, W) at exactly L's resolution.
  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& x);
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  Param<T>& band_mask() { return mask_; }
  const Param<T>& band_mask() const { return mask_; }

 private:
  int height_ = 0, width_ = 0;
  Param<T> mask_;  // (mask_channels, H, W)
  Tensor<T> spectrum_;
};

// Single-frame surface of the layer above.
struct BandSelectionMask {
  Tensor<float> l;  // (H, W)
  bool trainable = true;
};

struct EnhancedFrame {
  Tensor<float> pixels;  // (C, H, W)
};

BandSelectionMask AbsrInit(int height, int width, uint64_t seed);

// Per channel: idct2(dct2(frame_c) * L).
absl::StatusOr<EnhancedFrame> AbsrForward(const Frame& frame,
                                          const BandSelectionMask& mask);

}  // namespace fdin

#endif  // FDIN_ABSR_H_
