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

#include "fdin/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fdin/checkpoint.h"
#include "fdin/metrics.h"
#include "fdin/optimizer.h"

namespace fdin {
namespace {

// Fisher-Yates over our own generator so the order is portable.
void Shuffle(std::vector<size_t>& order, Rng& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[UniformInt(rng, 0, int64_t(i) - 1)]);
  }
}

std::string LogLine(const StepRecord& r) {
  return absl::StrFormat(
      "{\"step\":%d,\"epoch\":%d,\"lr\":%.17g,\"loss\":%.17g}\n", r.step,
      r.epoch, r.lr, r.loss);
}

}  // namespace

double LearningRateForEpoch(const TrainConfig& config, int epoch) {
  return epoch <= config.lr_halve_epoch ? config.learning_rate
                                        : 0.5 * config.learning_rate;
}

Batch StackWindows(const std::vector<ClipWindow>& windows) {
  FDIN_CHECK(!windows.empty());
  const Tensor<float>& f0 = windows[0].frames;
  const int64_t n = windows.size(), t = f0.dim(0), c = f0.dim(1), h = f0.dim(2),
                w = f0.dim(3);
  const int64_t plane = h * w;
  Batch batch{Tensor<float>({n, c, t, h, w}), Tensor<uint8_t>({n, t, h, w})};
  for (int64_t i = 0; i < n; ++i) {
    const ClipWindow& win = windows[i];
    FDIN_CHECK(win.frames.shape() == f0.shape());
    for (int64_t ti = 0; ti < t; ++ti) {
      for (int64_t ci = 0; ci < c; ++ci) {
        std::copy_n(win.frames.data() + (ti * c + ci) * plane, plane,
                    batch.frames.data() + ((i * c + ci) * t + ti) * plane);
      }
    }
    std::copy_n(win.masks.data(), t * plane,
                batch.targets.data() + i * t * plane);
  }
  return batch;
}

absl::StatusOr<TrainResult> Train(const std::vector<LabeledClip>& clips,
                                  const TrainConfig& train,
                                  const ModelConfig& model_config,
                                  const std::filesystem::path& out_dir,
                                  bool overwrite) {
  FDIN_RETURN_IF_ERROR(ValidateTrainConfig(train));
  if (clips.empty()) return absl::InvalidArgumentError("empty dataset");

  std::vector<ClipWindow> windows;
  for (const LabeledClip& clip : clips) {
    auto w = SlidingWindows(clip, train.t_c, train.train_stride);
    if (!w.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("clip ", clip.clip_id, ": ", w.status().message()));
    }
    for (auto& win : *w) windows.push_back(std::move(win));
  }

  const bool persist = !out_dir.empty();
  const auto ckpt_path = out_dir / kCheckpointFile;
  const auto log_path = out_dir / kTrainLogFile;
  std::ofstream log;
  if (persist) {
    if (!overwrite && (std::filesystem::exists(ckpt_path) ||
                       std::filesystem::exists(log_path))) {
      return absl::AlreadyExistsError(
          absl::StrCat("training output already present in ", out_dir.string(),
                       "; pass --overwrite to replace it"));
    }
    std::filesystem::create_directories(out_dir);
    log.open(log_path, std::ios::trunc);
    if (!log) {
      return absl::PermissionDeniedError(
          absl::StrCat("cannot write ", log_path.string()));
    }
  }

  TrainResult result;
  FDIN_ASSIGN_OR_RETURN(result.model, FdinModel<float>::Create(model_config));
  FdinModel<float>& model = *result.model;
  if (!train.pretrained_weights.empty()) {
    FDIN_ASSIGN_OR_RETURN(
        int copied, LoadMatchingWeights(train.pretrained_weights, &model));
    if (copied == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("pretrained_weights ", train.pretrained_weights,
                       " shares no tensors with this model"));
    }
  }
  Adam adam(&model.Parameters());
  // Augmentation and batching draw from their own stream so the model
  // initialization (seeded separately) does not shift them.
  Rng rng(train.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<size_t> order(windows.size());
  int64_t step = 0;
  bool stop = false;
  for (int epoch = 1; epoch <= train.epochs && !stop; ++epoch) {
    const double lr = LearningRateForEpoch(train, epoch);
    std::iota(order.begin(), order.end(), 0);
    Shuffle(order, rng);
    for (size_t begin = 0; begin < order.size() && !stop;
         begin += train.batch_size) {
      const size_t end = std::min(order.size(), begin + train.batch_size);
      std::vector<ClipWindow> batch_windows;
      for (size_t i = begin; i < end; ++i) {
        FDIN_ASSIGN_OR_RETURN(
            ClipWindow aug, Augment(windows[order[i]], rng, model_config.height,
                                    model_config.width, train.flip_prob));
        batch_windows.push_back(std::move(aug));
      }
      Batch batch = StackWindows(batch_windows);
      FDIN_ASSIGN_OR_RETURN(Tensor<float> logits,
                            model.Forward(batch.frames, /*training=*/true));
      FDIN_ASSIGN_OR_RETURN(BceResult bce, BceWithGrad(logits, batch.targets));
      ++step;
      if (!std::isfinite(bce.loss)) {
        return absl::InternalError(absl::StrCat("non-finite loss at step ",
                                                step, " (epoch ", epoch, ")"));
      }
      model.Parameters().ZeroGrad();
      model.Backward(bce.grad);
      adam.Step(lr);
      StepRecord rec{step, epoch, lr, bce.loss};
      result.log.push_back(rec);
      if (persist) log << LogLine(rec) << std::flush;
      if (train.max_steps > 0 && step >= train.max_steps) stop = true;
    }
    if (persist) {
      FDIN_RETURN_IF_ERROR(SaveCheckpoint(ckpt_path, model, step));
    }
  }
  return result;
}

}  // namespace fdin
