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

#include "fdin/absr.h"

#include "absl/strings/str_cat.h"
#include "fdin/spectral.h"

namespace fdin {

template <typename T>
Absr<T>::Absr(int height, int width, int mask_channels)
    : height_(height), width_(width) {
  FDIN_CHECK(height > 0 && width > 0 && mask_channels > 0);
  mask_.Reset({mask_channels, height, width});
}

template <typename T>
void Absr<T>::Init(Rng& rng) {
  for (T& v : mask_.value.values()) v = static_cast<T>(Uniform01(rng));
}

template <typename T>
absl::StatusOr<Tensor<T>> Absr<T>::Forward(const Tensor<T>& x) {
  if (x.rank() != 5 || x.dim(3) != height_ || x.dim(4) != width_) {
    return absl::InvalidArgumentError(
        absl::StrCat("ABSR resolution mismatch: input ", ShapeString(x.shape()),
                     " vs band mask ", height_, "x", width_));
  }
  const int64_t mask_channels = mask_.value.dim(0);
  if (mask_channels != 1 && mask_channels != x.dim(1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ABSR per-channel mask has ", mask_channels,
                     " channels, input has ", x.dim(1)));
  }
  const int64_t plane = int64_t(height_) * width_;
  const int64_t planes = x.size() / plane;
  spectrum_ = Tensor<T>(x.shape());
  spectral::Dct2Planes(x.data(), spectrum_.data(), planes, height_, width_);
  Tensor<T> filtered(x.shape());
  const int64_t frames = x.dim(2), channels = x.dim(1);
  for (int64_t p = 0; p < planes; ++p) {
    const int64_t c = mask_channels == 1 ? 0 : (p / frames) % channels;
    const T* l = mask_.value.data() + c * plane;
    const T* s = spectrum_.data() + p * plane;
    T* f = filtered.data() + p * plane;
    for (int64_t i = 0; i < plane; ++i) f[i] = s[i] * l[i];
  }
  Tensor<T> out(x.shape());
  spectral::Idct2Planes(filtered.data(), out.data(), planes, height_, width_);
  return out;
}

template <typename T>
Tensor<T> Absr<T>::Backward(const Tensor<T>& dy) {
  FDIN_CHECK(dy.SameShape(spectrum_));
  const int64_t plane = int64_t(height_) * width_;
  const int64_t planes = dy.size() / plane;
  const int64_t mask_channels = mask_.value.dim(0);
  const int64_t frames = dy.dim(2), channels = dy.dim(1);
  // The adjoint of the orthonormal IDCT is the DCT and vice versa.
  Tensor<T> g(dy.shape());
  spectral::Dct2Planes(dy.data(), g.data(), planes, height_, width_);
  for (int64_t p = 0; p < planes; ++p) {
    const int64_t c = mask_channels == 1 ? 0 : (p / frames) % channels;
    const T* l = mask_.value.data() + c * plane;
    T* dl = mask_.grad.data() + c * plane;
    const T* s = spectrum_.data() + p * plane;
    T* gp = g.data() + p * plane;
    for (int64_t i = 0; i < plane; ++i) {
      dl[i] += s[i] * gp[i];
      gp[i] *= l[i];
    }
  }
  Tensor<T> dx(dy.shape());
  spectral::Idct2Planes(g.data(), dx.data(), planes, height_, width_);
  return dx;
}

template <typename T>
void Absr<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  set->params.push_back({prefix + ".band_mask", &mask_});
}

template class Absr<float>;
template class Absr<double>;

BandSelectionMask AbsrInit(int height, int width, uint64_t seed) {
  Rng rng(seed);
  BandSelectionMask mask{Tensor<float>({height, width})};
  for (float& v : mask.l.values()) v = static_cast<float>(Uniform01(rng));
  return mask;
}

absl::StatusOr<EnhancedFrame> AbsrForward(const Frame& frame,
                                          const BandSelectionMask& mask) {
  const Tensor<float>& px = frame.pixels;
  if (px.rank() != 3 || mask.l.rank() != 2 || px.dim(1) != mask.l.dim(0) ||
      px.dim(2) != mask.l.dim(1)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ABSR resolution mismatch: frame ", ShapeString(px.shape()),
        " vs band mask ", ShapeString(mask.l.shape())));
  }
  Absr<float> layer(px.dim(1), px.dim(2), 1);
  layer.band_mask().value = mask.l.Reshaped({1, px.dim(1), px.dim(2)});
  FDIN_ASSIGN_OR_RETURN(
      Tensor<float> out,
      layer.Forward(px.Reshaped({1, px.dim(0), 1, px.dim(1), px.dim(2)})));
  out.Reshape(px.shape());
  return EnhancedFrame{std::move(out)};
}

}  // namespace fdin
