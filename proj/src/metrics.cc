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

#include "fdin/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "fdin/status_macros.h"

namespace fdin {
namespace {

// log(1 + exp(-|z|)) + max(z, 0) - z * y, stable for large |z|.
double BcePixel(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

absl::Status CheckPair(const MaskSequence& pred, const MaskSequence& gt) {
  if (pred.masks.rank() != 3 || pred.masks.shape() != gt.masks.shape()) {
    return absl::InvalidArgumentError(
        absl::StrCat("mask shapes differ: ", ShapeString(pred.masks.shape()),
                     " vs ", ShapeString(gt.masks.shape())));
  }
  for (const MaskSequence* m : {&pred, &gt}) {
    for (int64_t i = 0; i < m->masks.size(); ++i) {
      if (m->masks[i] > 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "non-binary mask value ", int(m->masks[i]), " at index ", i));
      }
    }
  }
  return absl::OkStatus();
}

struct FrameCounts {
  int64_t inter = 0, pred = 0, gt = 0;
};

std::vector<FrameCounts> CountFrames(const MaskSequence& pred,
                                     const MaskSequence& gt) {
  const int64_t frames = gt.masks.dim(0);
  const int64_t plane = gt.masks.dim(1) * gt.masks.dim(2);
  std::vector<FrameCounts> counts(frames);
  for (int64_t t = 0; t < frames; ++t) {
    const uint8_t* p = pred.masks.data() + t * plane;
    const uint8_t* g = gt.masks.data() + t * plane;
    FrameCounts& c = counts[t];
    for (int64_t i = 0; i < plane; ++i) {
      c.inter += p[i] & g[i];
      c.pred += p[i];
      c.gt += g[i];
    }
  }
  return counts;
}

}  // namespace

absl::StatusOr<double> BceLoss(const LogitMask& logits,
                               const MaskSequence& gt) {
  const Tensor<float>& z = logits.logits;
  if (z.rank() != 4 || z.dim(1) != 1 || gt.masks.rank() != 3 ||
      z.dim(0) != gt.masks.dim(0) || z.dim(2) != gt.masks.dim(1) ||
      z.dim(3) != gt.masks.dim(2)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "logits ", ShapeString(z.shape()), " do not align with masks ",
        ShapeString(gt.masks.shape())));
  }
  double sum = 0.0;
  for (int64_t i = 0; i < z.size(); ++i) sum += BcePixel(z[i], gt.masks[i]);
  return z.size() == 0 ? 0.0 : sum / double(z.size());
}

absl::StatusOr<BceResult> BceWithGrad(const Tensor<float>& logits,
                                      const Tensor<uint8_t>& targets) {
  if (logits.rank() != 5 || logits.dim(1) != 1 || targets.rank() != 4 ||
      logits.dim(0) != targets.dim(0) || logits.dim(2) != targets.dim(1) ||
      logits.dim(3) != targets.dim(2) || logits.dim(4) != targets.dim(3)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "logits ", ShapeString(logits.shape()), " do not align with targets ",
        ShapeString(targets.shape())));
  }
  BceResult result;
  result.grad = Tensor<float>(logits.shape());
  const double scale = 1.0 / double(logits.size());
  double sum = 0.0;
  for (int64_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i], y = targets[i];
    sum += BcePixel(z, y);
    result.grad[i] = static_cast<float>((Sigmoid(z) - y) * scale);
  }
  result.loss = sum * scale;
  return result;
}

absl::StatusOr<std::vector<double>> FrameIou(const MaskSequence& pred,
                                             const MaskSequence& gt) {
  FDIN_RETURN_IF_ERROR(CheckPair(pred, gt));
  std::vector<double> scores;
  for (const FrameCounts& c : CountFrames(pred, gt)) {
    const int64_t uni = c.pred + c.gt - c.inter;
    scores.push_back(uni == 0 ? 1.0 : double(c.inter) / double(uni));
  }
  return scores;
}

absl::StatusOr<std::vector<double>> FrameF1(const MaskSequence& pred,
                                            const MaskSequence& gt) {
  FDIN_RETURN_IF_ERROR(CheckPair(pred, gt));
  std::vector<double> scores;
  for (const FrameCounts& c : CountFrames(pred, gt)) {
    const int64_t denom = c.pred + c.gt;
    scores.push_back(denom == 0 ? 1.0 : 2.0 * double(c.inter) / double(denom));
  }
  return scores;
}

double Mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         double(values.size());
}

absl::StatusOr<double> ComputeMiou(const MaskSequence& pred,
                                   const MaskSequence& gt) {
  FDIN_ASSIGN_OR_RETURN(auto scores, FrameIou(pred, gt));
  return Mean(scores);
}

absl::StatusOr<double> ComputeF1(const MaskSequence& pred,
                                 const MaskSequence& gt) {
  FDIN_ASSIGN_OR_RETURN(auto scores, FrameF1(pred, gt));
  return Mean(scores);
}

}  // namespace fdin
