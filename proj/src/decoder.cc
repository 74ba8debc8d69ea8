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

#include "fdin/decoder.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace fdin {

template <typename T>
Decoder<T>::Decoder(const std::vector<int>& pyramid_channels)
    : channels_(pyramid_channels),
      head_({pyramid_channels.front(), 1, 3, 1, true}) {
  const int levels = num_levels();
  for (int j = 0; j + 1 < levels; ++j) {
    merges_.emplace_back(
        ConvSpec{channels_[j + 1] + channels_[j], channels_[j], 3, 1, false});
  }
}

template <typename T>
void Decoder<T>::Init(Rng& rng) {
  for (auto& m : merges_) m.Init(rng);
  head_.Init(rng);
}

template <typename T>
absl::StatusOr<Tensor<T>> Decoder<T>::Forward(const FeaturePyramid<T>& pyramid,
                                              const Tensor<T>& deepest,
                                              bool training) {
  const int levels = num_levels();
  if (static_cast<int>(pyramid.size()) != levels) {
    return absl::InvalidArgumentError(absl::StrCat(
        "decoder built for ", levels, " levels, pyramid has ", pyramid.size()));
  }
  if (deepest.shape() != pyramid.back().shape()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "deepest features ", ShapeString(deepest.shape()),
        " do not match pyramid level ", ShapeString(pyramid.back().shape())));
  }
  Tensor<T> cur = deepest;
  for (int j = levels - 2; j >= 0; --j) {
    Tensor<T> up = Upsample2x(cur);
    const Tensor<T>& skip = pyramid[j];
    if (skip.rank() != 5 || skip.dim(1) != channels_[j] ||
        up.dim(3) != skip.dim(3) || up.dim(4) != skip.dim(4) ||
        up.dim(2) != skip.dim(2)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "level ", j, " skip ", ShapeString(skip.shape()),
          " cannot merge with upsampled ", ShapeString(up.shape())));
    }
    cur = merges_[j].Forward(ConcatChannels(up, skip), training);
  }
  return head_.Forward(Upsample2x(cur));
}

template <typename T>
typename Decoder<T>::Gradients Decoder<T>::Backward(const Tensor<T>& dlogits) {
  const int levels = num_levels();
  Gradients grads;
  grads.d_pyramid.resize(levels);
  Tensor<T> d = Upsample2xBackward(head_.Backward(dlogits));
  for (int j = 0; j + 1 < levels; ++j) {
    auto [dup, dskip] = SplitChannels(merges_[j].Backward(d), channels_[j + 1]);
    grads.d_pyramid[j] = std::move(dskip);
    d = Upsample2xBackward(dup);
  }
  grads.d_deepest = std::move(d);
  return grads;
}

template <typename T>
void Decoder<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  for (int j = num_levels() - 2; j >= 0; --j) {
    merges_[j].Collect(absl::StrCat(prefix, ".merge", j), set);
  }
  head_.Collect(prefix + ".head", set);
}

template class Decoder<float>;
template class Decoder<double>;

MaskSequence Binarize(const LogitMask& logits, double threshold) {
  const Tensor<float>& z = logits.logits;
  FDIN_CHECK(z.rank() == 4 && z.dim(1) == 1);
  MaskSequence out{Tensor<uint8_t>({z.dim(0), z.dim(2), z.dim(3)})};
  for (int64_t i = 0; i < z.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-double(z[i])));
    out.masks[i] = p >= threshold ? 1 : 0;
  }
  return out;
}

}  // namespace fdin
