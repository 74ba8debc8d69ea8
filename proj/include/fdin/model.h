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

#ifndef FDIN_MODEL_H_
#define FDIN_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fdin/absr.h"
#include "fdin/decoder.h"
#include "fdin/encoder.h"
#include "fdin/ffca.h"

namespace fdin {

struct ModelConfig {
  int height = 64;
  int width = 112;
  int stem_channels = 16;
  std::vector<int> stage_channels = {16, 32, 64, 128};
  double ratio_global = 0.5;
  bool enable_absr = true;
  bool enable_ffca = true;
  bool absr_per_channel = false;  // one L per colour channel
  bool absr_concat_raw = false;   // encoder sees [enhanced, raw]
  uint64_t seed = 0;
};

absl::Status ValidateModelConfig(const ModelConfig& config);
// Canonical single-line JSON; the checkpoint digest is computed over it.
std::string ModelConfigToJson(const ModelConfig& config);
absl::StatusOr<ModelConfig> ModelConfigFromJson(const std::string& text);

// Frames (N, 3, T, H, W) -> ABSR -> encoder -> FFCA on the deepest level ->
// decoder -> logits (N, 1, T, H, W). Disabled stages pass data through.
template <typename T>
class FdinModel {
 public:
  static absl::StatusOr<std::unique_ptr<FdinModel>> Create(
      const ModelConfig& config);

  absl::StatusOr<Tensor<T>> Forward(const Tensor<T>& frames, bool training);
  // Accumulates gradients into every parameter reachable from Parameters().
  void Backward(const Tensor<T>& dlogits);

  // Pointers stay valid for the model's lifetime.
  ParamSet<T>& Parameters() { return params_; }
  const ModelConfig& config() const { return config_; }

  Absr<T>& absr() { return absr_; }
  Encoder<T>& encoder() { return encoder_; }
  Ffca<T>& ffca() { return ffca_; }
  Decoder<T>& decoder() { return decoder_; }

 private:
  explicit FdinModel(const ModelConfig& config);

  ModelConfig config_;
  Absr<T> absr_;
  Encoder<T> encoder_;
  Ffca<T> ffca_;
  Decoder<T> decoder_;
  ParamSet<T> params_;
};

}  // namespace fdin

#endif  // FDIN_MODEL_H_
