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

#include "fdin/model.h"

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace fdin {

absl::Status ValidateModelConfig(const ModelConfig& config) {
  if (config.height < 1 || config.width < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "resolution must be positive, got ", config.height, "x", config.width));
  }
  if (config.stem_channels < 1) {
    return absl::InvalidArgumentError("stem_channels must be positive");
  }
  if (config.stage_channels.empty()) {
    return absl::InvalidArgumentError("stage_channels must not be empty");
  }
  for (int c : config.stage_channels) {
    if (c < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("stage channel counts must be positive, got ", c));
    }
  }
  const int factor = 1 << config.stage_channels.size();
  if (config.height % factor != 0 || config.width % factor != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "resolution ", config.height, "x", config.width,
        " is not divisible by ", factor, " (", config.stage_channels.size(),
        " stride-2 stages); pad or resize frames first"));
  }
  if (config.enable_ffca) {
    FDIN_RETURN_IF_ERROR(
        BranchSizes(config.stage_channels.back(), config.ratio_global)
            .status());
  }
  return absl::OkStatus();
}

std::string ModelConfigToJson(const ModelConfig& config) {
  nlohmann::ordered_json j;
  j["height"] = config.height;
  j["width"] = config.width;
  j["stem_channels"] = config.stem_channels;
  j["stage_channels"] = config.stage_channels;
  j["ratio_global"] = config.ratio_global;
  j["enable_absr"] = config.enable_absr;
  j["enable_ffca"] = config.enable_ffca;
  j["absr_per_channel"] = config.absr_per_channel;
  j["absr_concat_raw"] = config.absr_concat_raw;
  j["seed"] = config.seed;
  return j.dump();
}

absl::StatusOr<ModelConfig> ModelConfigFromJson(const std::string& text) {
  ModelConfig config;
  try {
    const auto j = nlohmann::json::parse(text);
    config.height = j.at("height").get<int>();
    config.width = j.at("width").get<int>();
    config.stem_channels = j.at("stem_channels").get<int>();
    config.stage_channels = j.at("stage_channels").get<std::vector<int>>();
    config.ratio_global = j.at("ratio_global").get<double>();
    config.enable_absr = j.at("enable_absr").get<bool>();
    config.enable_ffca = j.at("enable_ffca").get<bool>();
    config.absr_per_channel = j.at("absr_per_channel").get<bool>();
    config.absr_concat_raw = j.at("absr_concat_raw").get<bool>();
    config.seed = j.at("seed").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad model config JSON: ", e.what()));
  }
  FDIN_RETURN_IF_ERROR(ValidateModelConfig(config));
  return config;
}

namespace {

constexpr int kColorChannels = 3;

bool ConcatRaw(const ModelConfig& config) {
  return config.enable_absr && config.absr_concat_raw;
}

}  // namespace

template <typename T>
FdinModel<T>::FdinModel(const ModelConfig& config) : config_(config) {
  EncoderConfig enc;
  enc.in_channels = ConcatRaw(config) ? 2 * kColorChannels : kColorChannels;
  enc.stem_channels = config.stem_channels;
  enc.stage_channels = config.stage_channels;
  encoder_ = Encoder<T>(enc);
  decoder_ = Decoder<T>(config.stage_channels);

  Rng rng(config.seed);
  if (config.enable_absr) {
    absr_ = Absr<T>(config.height, config.width,
                    config.absr_per_channel ? kColorChannels : 1);
    absr_.Init(rng);
    absr_.Collect("absr", &params_);
  }
  encoder_.Init(rng);
  encoder_.Collect("encoder", &params_);
  if (config.enable_ffca) {
    ffca_ = Ffca<T>({config.stage_channels.back(), config.ratio_global});
    ffca_.Init(rng);
    ffca_.Collect("ffca", &params_);
  }
  decoder_.Init(rng);
  decoder_.Collect("decoder", &params_);
}

template <typename T>
absl::StatusOr<std::unique_ptr<FdinModel<T>>> FdinModel<T>::Create(
    const ModelConfig& config) {
  FDIN_RETURN_IF_ERROR(ValidateModelConfig(config));
  return std::unique_ptr<FdinModel<T>>(new FdinModel<T>(config));
}

template <typename T>
absl::StatusOr<Tensor<T>> FdinModel<T>::Forward(const Tensor<T>& frames,
                                                bool training) {
  if (frames.rank() != 5 || frames.dim(1) != kColorChannels) {
    return absl::InvalidArgumentError(absl::StrCat(
        "model expects (N,3,T,H,W) frames, got ", ShapeString(frames.shape())));
  }
  if (frames.dim(3) != config_.height || frames.dim(4) != config_.width) {
    return absl::InvalidArgumentError(
        absl::StrCat("frames are ", frames.dim(3), "x", frames.dim(4),
                     " but the model is configured for ", config_.height, "x",
                     config_.width));
  }
  Tensor<T> enc_in;
  if (config_.enable_absr) {
    FDIN_ASSIGN_OR_RETURN(enc_in, absr_.Forward(frames));
    if (config_.absr_concat_raw) enc_in = ConcatChannels(enc_in, frames);
  } else {
    enc_in = frames;
  }
  FDIN_ASSIGN_OR_RETURN(FeaturePyramid<T> pyramid,
                        encoder_.Forward(enc_in, training));
  Tensor<T> deepest;
  if (config_.enable_ffca) {
    FDIN_ASSIGN_OR_RETURN(deepest, ffca_.Forward(pyramid.back(), training));
  } else {
    deepest = pyramid.back();
  }
  return decoder_.Forward(pyramid, deepest, training);
}

template <typename T>
void FdinModel<T>::Backward(const Tensor<T>& dlogits) {
  auto grads = decoder_.Backward(dlogits);
  grads.d_pyramid.back() = config_.enable_ffca ? ffca_.Backward(grads.d_deepest)
                                               : std::move(grads.d_deepest);
  Tensor<T> d_in = encoder_.Backward(grads.d_pyramid);
  if (config_.enable_absr) {
    if (config_.absr_concat_raw) {
      d_in = SplitChannels(d_in, kColorChannels).first;
    }
    absr_.Backward(d_in);
  }
}

template class FdinModel<float>;
template class FdinModel<double>;

}  // namespace fdin
