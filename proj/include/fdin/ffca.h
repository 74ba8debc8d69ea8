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

#ifndef FDIN_FFCA_H_
#define FDIN_FFCA_H_

#include <string>
#include <utility>

#include "absl/status/statusor.h"
#include "fdin/layers.h"

namespace fdin {

// Channel counts (local, global) for a split of `channels` with
// round(ratio_global * channels) global channels.
absl::StatusOr<std::pair<int, int>> BranchSizes(int channels,
                                                double ratio_global);

template <typename T>
struct BranchSplit {
  Tensor<T> z_local;   // leading channels
  Tensor<T> z_global;  // trailing channels
};

template <typename T>
absl::StatusOr<BranchSplit<T>> SplitBranches(const Tensor<T>& z,
                                             double ratio_global);

// Local unit: 3x3x3 conv -> norm -> ReLU. The conv has no bias; the norm
// would cancel it.
template <typename T>
class Lfu {
 public:
  Lfu() = default;
  explicit Lfu(int channels);

  void Init(Rng& rng) { unit_.Init(rng); }
  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& x, bool training);
  Tensor<T> Backward(const Tensor<T>& dy) { return unit_.Backward(dy); }
  void Collect(const std::string& prefix, ParamSet<T>* set) {
    unit_.Collect(prefix, set);
  }

  Conv3d<T>& conv() { return unit_.conv(); }
  BatchNorm3d<T>& norm() { return unit_.norm(); }

 private:
  int channels_ = 0;
  ConvNormRelu<T> unit_;
};

// Global unit: spatial rFFT, real and imaginary parts stacked as 2*C
// channels, pointwise conv -> norm -> ReLU, then the inverse rFFT.
template <typename T>
class Gfu {
 public:
  Gfu() = default;
  explicit Gfu(int channels);

  void Init(Rng& rng) { spectral_.Init(rng); }
  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& x, bool training);
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set) {
    spectral_.Collect(prefix + ".spectral", set);
  }

  Conv3d<T>& spectral_conv() { return spectral_.conv(); }
  BatchNorm3d<T>& norm() { return spectral_.norm(); }

 private:
  int channels_ = 0;
  int height_ = 0, width_ = 0;
  ConvNormRelu<T> spectral_;
};

struct FfcaConfig {
  int channels = 128;
  double ratio_global = 0.5;
};

// out = z + fuse(concat(lfu(z_local), gfu(z_global))), fuse a 1x1x1 conv.
template <typename T>
class Ffca {
 public:
  Ffca() = default;
  // Validates the split; use Create for untrusted configs.
  explicit Ffca(const FfcaConfig& config);
  static absl::StatusOr<Ffca> Create(const FfcaConfig& config);

  void Init(Rng& rng);
  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& z, bool training);
  Tensor<T> Backward(const Tensor<T>& dy);
  void Collect(const std::string& prefix, ParamSet<T>* set);

  Lfu<T>& lfu() { return lfu_; }
  Gfu<T>& gfu() { return gfu_; }
  Conv3d<T>& fuse() { return fuse_; }
  int local_channels() const { return local_channels_; }

 private:
  FfcaConfig config_;
  int local_channels_ = 0;
  Lfu<T> lfu_;
  Gfu<T> gfu_;
  Conv3d<T> fuse_;
};

}  // namespace fdin

#endif  // FDIN_FFCA_H_
