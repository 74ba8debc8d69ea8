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

#ifndef FDIN_TRAINER_H_
#define FDIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "absl/status/statusor.h"
#include "fdin/model.h"
#include "fdin/run_config.h"
#include "fdin/video_data.h"

namespace fdin {

// Base rate through epoch lr_halve_epoch, half of it afterwards. Epochs
// count from 1.
double LearningRateForEpoch(const TrainConfig& config, int epoch);

// Stacks windows into network layout: frames (N, 3, T, H, W) and targets
// (N, T, H, W).
struct Batch {
  Tensor<float> frames;
  Tensor<uint8_t> targets;
};
Batch StackWindows(const std::vector<ClipWindow>& windows);

struct StepRecord {
  int64_t step = 0;  // 1-based
  int epoch = 0;     // 1-based
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<StepRecord> log;
  std::unique_ptr<FdinModel<float>> model;
};

inline constexpr char kCheckpointFile[] = "checkpoint.fdin";
inline constexpr char kTrainLogFile[] = "train_log.ndjson";

// Writes <out_dir>/train_log.ndjson (one record per step) and overwrites
// <out_dir>/checkpoint.fdin after every epoch and at a max_steps stop.
// Refuses to clobber an existing run unless `overwrite`. An empty `out_dir`
// keeps everything in memory.
absl::StatusOr<TrainResult> Train(const std::vector<LabeledClip>& clips,
                                  const TrainConfig& train,
                                  const ModelConfig& model_config,
                                  const std::filesystem::path& out_dir,
                                  bool overwrite);

}  // namespace fdin

#endif  // FDIN_TRAINER_H_
