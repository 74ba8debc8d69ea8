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

#ifndef FDIN_METRICS_H_
#define FDIN_METRICS_H_

#include <vector>

#include "absl/status/statusor.h"
#include "fdin/decoder.h"
#include "fdin/video_data.h"

namespace fdin {

// Mean per-pixel binary cross-entropy of sigmoid(logits) against `gt`.
absl::StatusOr<double> BceLoss(const LogitMask& logits, const MaskSequence& gt);

// Loss and d(loss)/d(logits) for a batch: `logits` (N, 1, T, H, W) and
// `targets` (N, T, H, W) in {0, 1}. Mean over all N*T*H*W pixels.
struct BceResult {
  double loss = 0.0;
  Tensor<float> grad;
};
absl::StatusOr<BceResult> BceWithGrad(const Tensor<float>& logits,
                                      const Tensor<uint8_t>& targets);

// Per-frame scores. A frame where both masks are empty scores 1.
absl::StatusOr<std::vector<double>> FrameIou(const MaskSequence& pred,
                                             const MaskSequence& gt);
absl::StatusOr<std::vector<double>> FrameF1(const MaskSequence& pred,
                                            const MaskSequence& gt);

// Means of the per-frame scores above.
absl::StatusOr<double> ComputeMiou(const MaskSequence& pred,
                                   const MaskSequence& gt);
absl::StatusOr<double> ComputeF1(const MaskSequence& pred,
                                 const MaskSequence& gt);

double Mean(const std::vector<double>& values);

}  // namespace fdin

#endif  // FDIN_METRICS_H_
