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

#include "fdin/encoder.h"

#include "absl/strings/str_cat.h"

namespace fdin {

template <typename T>
ResBlock<T>::ResBlock(int in_channels, int out_channels, int spatial_stride)
    : in_channels_(in_channels),
      has_projection_(in_channels != out_channels || spatial_stride != 1),
      conv1_({in_channels, out_channels, 3, spatial_stride, false}),
      conv2_({out_channels, out_channels, 3, 1, false}),
      norm1_(out_channels),
      norm2_(out_channels) {
  if (has_projection_) {
    projection_ =
        Conv3d<T>({in_channels, out_channels, 1, spatial_stride, true});
  }
}

template <typename T>
void ResBlock<T>::Init(Rng& rng) {
  conv1_.Init(rng);
  conv2_.Init(rng);
  if (has_projection_) projection_.Init(rng);
}

template <typename T>
absl::StatusOr<Tensor<T>> ResBlock<T>::Forward(const Tensor<T>& x,
                                               bool training) {
  if (x.rank() != 5 || x.dim(1) != in_channels_) {
    return absl::InvalidArgumentError(
        absl::StrCat("resblock expects (N,", in_channels_, ",T,H,W), got ",
                     ShapeString(x.shape())));
  }
  Tensor<T> f = relu1_.Forward(norm1_.Forward(conv1_.Forward(x), training));
  f = norm2_.Forward(conv2_.Forward(f), training);
  if (has_projection_) {
    f.Axpy(T(1), projection_.Forward(x));
  } else {
    f.Axpy(T(1), x);
  }
  return relu_out_.Forward(f);
}

template <typename T>
Tensor<T> ResBlock<T>::Backward(const Tensor<T>& dy) {
  const Tensor<T> dsum = relu_out_.Backward(dy);
  Tensor<T> dx = conv1_.Backward(
      norm1_.Backward(relu1_.Backward(conv2_.Backward(norm2_.Backward(dsum)))));
  if (has_projection_) {
    dx.Axpy(T(1), projection_.Backward(dsum));
  } else {
    dx.Axpy(T(1), dsum);
  }
  return dx;
}

template <typename T>
void ResBlock<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  conv1_.Collect(prefix + ".conv1", set);
  norm1_.Collect(prefix + ".norm1", set);
  conv2_.Collect(prefix + ".conv2", set);
  norm2_.Collect(prefix + ".norm2", set);
  if (has_projection_) projection_.Collect(prefix + ".projection", set);
}

template <typename T>
Encoder<T>::Encoder(const EncoderConfig& config)
    : config_(config),
      stem_({config.in_channels, config.stem_channels, 3, 1, false}) {
  FDIN_CHECK(!config.stage_channels.empty());
  int in = config.stem_channels;
  for (int out : config.stage_channels) {
    down_.emplace_back(in, out, 2);
    same_.emplace_back(out, out, 1);
    in = out;
  }
}

template <typename T>
void Encoder<T>::Init(Rng& rng) {
  stem_.Init(rng);
  for (int s = 0; s < num_stages(); ++s) {
    down_[s].Init(rng);
    same_[s].Init(rng);
  }
}

template <typename T>
absl::StatusOr<FeaturePyramid<T>> Encoder<T>::Forward(const Tensor<T>& x,
                                                      bool training) {
  if (x.rank() != 5 || x.dim(1) != config_.in_channels) {
    return absl::InvalidArgumentError(
        absl::StrCat("encoder expects (N,", config_.in_channels,
                     ",T,H,W), got ", ShapeString(x.shape())));
  }
  const int64_t factor = int64_t(1) << num_stages();
  if (x.dim(3) % factor != 0 || x.dim(4) % factor != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "spatial dims ", x.dim(3), "x", x.dim(4), " not divisible by ", factor,
        " for ", num_stages(), " stages; pad the input upstream"));
  }
  FeaturePyramid<T> pyramid;
  Tensor<T> h = stem_.Forward(x, training);
  for (int s = 0; s < num_stages(); ++s) {
    FDIN_ASSIGN_OR_RETURN(h, down_[s].Forward(h, training));
    FDIN_ASSIGN_OR_RETURN(h, same_[s].Forward(h, training));
    pyramid.push_back(h);
  }
  level_shapes_.clear();
  for (const auto& level : pyramid) level_shapes_.push_back(level.shape());
  return pyramid;
}

template <typename T>
Tensor<T> Encoder<T>::Backward(const FeaturePyramid<T>& d_pyramid) {
  FDIN_CHECK(static_cast<int>(d_pyramid.size()) == num_stages());
  Tensor<T> grad(level_shapes_.back());
  for (int s = num_stages() - 1; s >= 0; --s) {
    if (!d_pyramid[s].empty()) grad.Axpy(T(1), d_pyramid[s]);
    grad = down_[s].Backward(same_[s].Backward(grad));
  }
  return stem_.Backward(grad);
}

template <typename T>
void Encoder<T>::Collect(const std::string& prefix, ParamSet<T>* set) {
  stem_.Collect(prefix + ".stem", set);
  for (int s = 0; s < num_stages(); ++s) {
    down_[s].Collect(absl::StrCat(prefix, ".stage", s, ".down"), set);
    same_[s].Collect(absl::StrCat(prefix, ".stage", s, ".same"), set);
  }
}

template class ResBlock<float>;
template class ResBlock<double>;
template class Encoder<float>;
template class Encoder<double>;

}  // namespace fdin
