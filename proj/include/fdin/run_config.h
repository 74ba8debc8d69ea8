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

#ifndef FDIN_RUN_CONFIG_H_
#define FDIN_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fdin/model.h"
#include "fdin/synth.h"

namespace fdin {

struct TrainConfig {
  double learning_rate = 1e-4;
  int lr_halve_epoch = 10;  // lr halves from epoch lr_halve_epoch + 1
  int epochs = 20;
  int batch_size = 4;
  int t_c = 8;
  int train_stride = 1;
  int64_t max_steps = 0;  // 0: run every epoch to completion
  double flip_prob = 0.5;
  uint64_t seed = 0;
  int workers = 0;  // clip loaders; 0 picks from FDIN_NUM_THREADS
  std::string pretrained_weights;
};

absl::Status ValidateTrainConfig(const TrainConfig& config);

// Everything one CLI invocation can be told. The model's resolution doubles
// as the synthetic frame size.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string manifest;
  std::string checkpoint;
  std::string predictions;  // eval: masks manifest to score instead of a model
  double threshold = 0.5;
  std::vector<int> qf_list = {90, 70};
  int n_clips = 4;
  int frames = 8;
  FillMethod method = FillMethod::kBlurFill;
  std::string gradcheck_corrupt;  // "" or a module name (negative control)
};

// Flat "key = value" text; '#' starts a comment. `overrides` are "key=value"
// strings applied after the file. Unknown keys and malformed values fail
// with a message naming the key.
absl::StatusOr<RunConfig> ParseRunConfig(
    const std::string& text, const std::vector<std::string>& overrides);
absl::StatusOr<RunConfig> LoadRunConfig(
    const std::filesystem::path& path,
    const std::vector<std::string>& overrides);

// Every key with its effective value, sorted by key; parses back to an
// equal config.
std::string EffectiveConfigText(const RunConfig& config);
uint64_t RunConfigDigest(const RunConfig& config);

std::vector<std::string> RunConfigKeys();

}  // namespace fdin

#endif  // FDIN_RUN_CONFIG_H_
