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

#include "fdin/ffca.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "fdin/spectral.h"

namespace fdin {

absl::StatusOr<std::pair<int, int>> BranchSizes(int channels,
                                                double ratio_global) {
  if (!(ratio_global > 0.0 && ratio_global < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ratio_global must be in (0,1), got ", ratio_global));
  }
  if (channels < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("FFCA needs at least 2 channels, got ", channels));
  }
  const int global = static_cast<int>(std::lround(ratio_global * channels));
  const int local = channels - global;
  if (global == 0 || local == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "split of ", channels, " channels at ratio ", ratio_global,
        " leaves an empty branch (local=", local, ", global=", global, ")"));
  }
  return std::make_pair(local, global);
}

template <typename T>
absl::StatusOr<BranchSplit<T>> SplitBranches(const Tensor<T>& z,
                                             double ratio_global) {
  if (z.rank() != 5) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected (N,C,T,H,W), got ", ShapeString(z.shape())));
  }
  FDIN_ASSIGN_OR_RETURN(auto sizes, BranchSizes(z.dim(1), ratio_global));
  auto [local, global] = SplitChannels(z, sizes.first);
  return BranchSplit<T>{std::move(local), std::move(global)};
}

template <typename T>
Lfu<T>::Lfu(int channels)
    : channels_(channels), unit_({channels, channels, 3, 1, false}) {}

template <typename T>
absl::StatusOr<Tensor<T>> Lfu<T>::Forward(const Tensor<T>& x, bool training) {
  if (x.rank() != 5 || x.dim(1) != channels_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "LFU expects ", channels_, " channels, got ", ShapeString(x.shape())));
  }
  return unit_.Forward(x, training);
}

template <typename T>
Gfu<T>::Gfu(int channels)
    : channels_(channels),
      spectral_({2 * channels, 2 * channels, 1, 1, false}) {}

template <typename T>
absl::StatusOr<Tensor<T>> Gfu<T>::Forward(const Tensor<T>& x, bool training) {
  if (x.rank() != 5 || x.dim(1) != channels_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "GFU expects ", channels_, " channels, got ", ShapeString(x.shape())));
  }
  height_ = x.dim(3);
  width_ = x.dim(4);
  const int half = width_ / 2 + 1;
  Shape spec_shape = x.shape();
  spec_shape[4] = half;
  Tensor<T> re(spec_shape), im(spec_shape);
  const int64_t planes = x.size() / (int64_t(height_) * width_);
  spectral::RfftPlanes(x.data(), re.data(), im.data(), planes, height_, width_);
  Tensor<T> refined = spectral_.Forward(ConcatChannels(re, im), training);
  if (!AllFinite(refined)) {
    return absl::InternalError("GFU: non-finite intermediate spectrum");
  }
  auto [re2, im2] = SplitChannels(refined, channels_);
  Tensor<T> out(x.shape());
  spectral::IrfftPlanes(re2.data(), im2.data(), out.data(), planes, height_,
                        width_, true);
  return out;
}

template <typename T>
Tensor<T> Gfu<T>::Backward(const Tensor<T>& dy) {
  const int half = width_ / 2 + 1;
  Shape spec_shape = dy.shape();
  spec_shape[4] = half;
  Tensor<T> gre(spec_shape), gim(spec_shape);
  const int64_t planes = dy.size() / (int64_t(height_) * width_);
  spectral::IrfftAdjointPlanes(dy.data(), gre.data(), gim.data(), planes,
                               height_, width_);
  Tensor<T> dstack = spectral_.Backward(ConcatChannels(gre, gim));
  auto [dre, dim] = SplitChannels(dstack, channels_);
  Tensor<T> dx(dy.shape());
  // Adjoint of the forward rFFT: unweighted inverse.
  spectral::IrfftPlanes(dre.data(), dim.data(), dx.data(), planes, height_,
                        width_, false);
  return dx;
}

template <typename T>
Ffca<T>::Ffca(const FfcaConfig& config) : config_(config) {
  auto sizes = BranchSizes(config.channels, config.ratio_global);
  FDIN_CHECK(sizes.ok());
  local_channels_ = sizes->first;
  lfu_ = Lfu<T>(sizes->first);
  gfu_ = Gfu<T>(sizes->second);
  fuse_ = Conv3d<T>({config.channels, config.channels, 1, 1, true});
}

template <typename T>
absl::StatusOr<Ffca<T>> Ffca<T>::Create(const FfcaConfig& config) {
  FDIN_RETURN_IF_ERROR(
      BranchSizes(config.channels, config.ratio_global).status());
  return Ffca<T>(config);
}

template <typename T>
void Ffca<T>::Init(Rng& rng) {
  lfu_.Init(rng);
  gfu_.Init(rng);
  fuse_.Init(rng);
}

template <typename T>
absl::StatusOr<Tensor<T>> Ffca<T>::Forward(const Tensor<T>& z, bool training) {
  if (z.rank() != 5 || z.dim(1) != config_.channels) {
    return absl::InvalidArgumentError(
        absl::StrCat("FFCA expects ", config_.channels, " channels, got ",
                     ShapeString(z.shape())));
  }
  auto [z_local, z_global] = SplitChannels(z, local_channels_);
  FDIN_ASSIGN_OR_RETURN(Tensor<T> local, lfu_.Forward(z_local, training));
  FDIN_ASSIGN_OR_RETURN(Tensor<T> global, gfu_.Forward(z_global, training));
  Tensor<T> out = fuse_.Forward(ConcatChannels(local, global));
  out.Axpy(T(1), z);
  return out;
}

template <typename T>
Tensor<T> Ffca<T>::Backward(const Tensor<T>& dy) {
  auto [dlocal, dglobal] = SplitChannels(fuse_.Backward(dy), local_channels_);
  Tensor<T> dz = ConcatChannels(lfu_.Backward(dlocal), gfu_.Backward(dglobal));
  dz.Axpy(T(1), dy);
  return dz;
}

template <typename T>
void Ffca<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  lfu_.Collect(prefix + ".lfu", set);
  gfu_.Collect(prefix + ".gfu", set);
  fuse_.Collect(prefix + ".fuse", set);
}

template absl::StatusOr<BranchSplit<float>> SplitBranches<float>(
    const Tensor<float>&, double);
template absl::StatusOr<BranchSplit<double>> SplitBranches<double>(
    const Tensor<double>&, double);
template class Lfu<float>;
template class Lfu<double>;
template class Gfu<float>;
template class Gfu<double>;
template class Ffca<float>;
template class Ffca<double>;

}  // namespace fdin
