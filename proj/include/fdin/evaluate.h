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

#ifndef FDIN_EVALUATE_H_
#define FDIN_EVALUATE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fdin/decoder.h"
#include "fdin/model.h"
#include "fdin/video_data.h"

namespace fdin {

// Logits for a whole clip: windows at stride t_c plus one anchored at T - t_c
// when needed; frames covered twice get the mean of their logits.
absl::StatusOr<LogitMask> PredictClipLogits(FdinModel<float>& model,
                                            const VideoClip& clip, int t_c);

struct ClipMetrics {
  std::string clip_id;
  std::vector<double> frame_iou;
  std::vector<double> frame_f1;
  double miou = 0.0;
  double f1 = 0.0;
};

// Aggregates are means over every frame of every clip.
struct MetricsReport {
  std::string condition;
  uint64_t seed = 0;
  uint64_t config_digest = 0;
  std::vector<ClipMetrics> clips;
  double miou = 0.0;
  double f1 = 0.0;
};

struct EvalOptions {
  int t_c = 8;
  double threshold = 0.5;
  std::string condition = "uncompressed";
  uint64_t seed = 0;
  uint64_t config_digest = 0;
};

// Scores already-binarized predictions, paired with `gt` by position.
absl::StatusOr<MetricsReport> ScorePredictions(
    const std::vector<LabeledClip>& gt, const std::vector<MaskSequence>& pred,
    const EvalOptions& options);

absl::StatusOr<std::vector<MaskSequence>> PredictMasks(
    FdinModel<float>& model, const std::vector<LabeledClip>& clips,
    const EvalOptions& options);

absl::StatusOr<MetricsReport> Evaluate(FdinModel<float>& model,
                                       const std::vector<LabeledClip>& clips,
                                       const EvalOptions& options);

// Reads masks from a predictions manifest (same clip ids as `gt`).
absl::StatusOr<MetricsReport> EvaluatePredictionManifest(
    const std::vector<LabeledClip>& gt,
    const std::filesystem::path& predictions_manifest,
    const EvalOptions& options);

// One JSON object per line: a "clip" record per clip, then an "aggregate".
std::string ReportToNdjson(const MetricsReport& report);
absl::Status WriteReport(const MetricsReport& report,
                         const std::filesystem::path& path);

// "uncompressed" first, then each quality factor from highest to lowest.
absl::StatusOr<std::vector<int>> RobustnessQfOrder(std::vector<int> qf_list);
std::string ConditionLabel(int qf);  // 0 -> "uncompressed", else "QF<qf>"

absl::StatusOr<std::vector<MetricsReport>> RobustnessEval(
    FdinModel<float>& model, const std::vector<LabeledClip>& clips,
    const std::vector<int>& qf_list, const EvalOptions& options);

// condition <TAB> miou <TAB> f1, one row per report.
std::string RobustnessSummaryTsv(const std::vector<MetricsReport>& reports);

// Writes <out_dir>/<clip_id>/mask_%05d.png (0/255) for every frame and
// <out_dir>/predictions.tsv pointing at them.
absl::StatusOr<DatasetManifest> WritePredictions(
    const DatasetManifest& source, const std::vector<MaskSequence>& masks,
    const std::filesystem::path& out_dir);

}  // namespace fdin

#endif  // FDIN_EVALUATE_H_
