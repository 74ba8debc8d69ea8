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

#include "fdin/evaluate.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "fdin/metrics.h"
#include "fdin/trainer.h"

namespace fdin {
namespace {

std::string JsonArray(const std::vector<double>& values) {
  return absl::StrCat("[",
                      absl::StrJoin(values, ",",
                                    [](std::string* out, double v) {
                                      absl::StrAppendFormat(out, "%.17g", v);
                                    }),
                      "]");
}

}  // namespace

absl::StatusOr<LogitMask> PredictClipLogits(FdinModel<float>& model,
                                            const VideoClip& clip, int t_c) {
  const ModelConfig& mc = model.config();
  if (clip.height() != mc.height || clip.width() != mc.width) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clip resolution ", clip.height(), "x", clip.width(),
        " does not match the checkpoint's ", mc.height, "x", mc.width));
  }
  FDIN_ASSIGN_OR_RETURN(std::vector<int64_t> starts,
                        CoverageStarts(clip.length(), t_c));
  const int64_t frames = clip.length(), h = mc.height, w = mc.width;
  const int64_t plane = h * w;
  std::vector<double> sum(frames * plane, 0.0);
  std::vector<int> count(frames, 0);
  const Tensor<float> all = ClipTensor(clip);
  for (int64_t start : starts) {
    ClipWindow win;
    win.frames = Tensor<float>({t_c, 3, h, w});
    std::copy_n(all.data() + start * 3 * plane, t_c * 3 * plane,
                win.frames.data());
    win.masks = Tensor<uint8_t>({t_c, h, w});
    Batch batch = StackWindows({win});
    FDIN_ASSIGN_OR_RETURN(Tensor<float> logits,
                          model.Forward(batch.frames, /*training=*/false));
    for (int64_t t = 0; t < t_c; ++t) {
      const float* src = logits.data() + t * plane;
      double* dst = sum.data() + (start + t) * plane;
      for (int64_t i = 0; i < plane; ++i) dst[i] += src[i];
      ++count[start + t];
    }
  }
  LogitMask out{Tensor<float>({frames, 1, h, w})};
  for (int64_t t = 0; t < frames; ++t) {
    for (int64_t i = 0; i < plane; ++i) {
      out.logits[t * plane + i] =
          static_cast<float>(sum[t * plane + i] / count[t]);
    }
  }
  return out;
}

absl::StatusOr<MetricsReport> ScorePredictions(
    const std::vector<LabeledClip>& gt, const std::vector<MaskSequence>& pred,
    const EvalOptions& options) {
  if (gt.size() != pred.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        gt.size(), " ground-truth clips but ", pred.size(), " predictions"));
  }
  MetricsReport report;
  report.condition = options.condition;
  report.seed = options.seed;
  report.config_digest = options.config_digest;
  std::vector<double> all_iou, all_f1;
  for (size_t i = 0; i < gt.size(); ++i) {
    ClipMetrics cm;
    cm.clip_id = gt[i].clip_id;
    auto iou = FrameIou(pred[i], gt[i].masks);
    if (!iou.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("clip ", cm.clip_id, ": ", iou.status().message()));
    }
    FDIN_ASSIGN_OR_RETURN(cm.frame_f1, FrameF1(pred[i], gt[i].masks));
    cm.frame_iou = *std::move(iou);
    cm.miou = Mean(cm.frame_iou);
    cm.f1 = Mean(cm.frame_f1);
    all_iou.insert(all_iou.end(), cm.frame_iou.begin(), cm.frame_iou.end());
    all_f1.insert(all_f1.end(), cm.frame_f1.begin(), cm.frame_f1.end());
    report.clips.push_back(std::move(cm));
  }
  report.miou = Mean(all_iou);
  report.f1 = Mean(all_f1);
  return report;
}

absl::StatusOr<std::vector<MaskSequence>> PredictMasks(
    FdinModel<float>& model, const std::vector<LabeledClip>& clips,
    const EvalOptions& options) {
  std::vector<MaskSequence> preds;
  for (const LabeledClip& clip : clips) {
    auto logits = PredictClipLogits(model, clip.clip, options.t_c);
    if (!logits.ok()) {
      return absl::Status(
          logits.status().code(),
          absl::StrCat("clip ", clip.clip_id, ": ", logits.status().message()));
    }
    preds.push_back(Binarize(*logits, options.threshold));
  }
  return preds;
}

absl::StatusOr<MetricsReport> Evaluate(FdinModel<float>& model,
                                       const std::vector<LabeledClip>& clips,
                                       const EvalOptions& options) {
  FDIN_ASSIGN_OR_RETURN(auto preds, PredictMasks(model, clips, options));
  return ScorePredictions(clips, preds, options);
}

absl::StatusOr<MetricsReport> EvaluatePredictionManifest(
    const std::vector<LabeledClip>& gt,
    const std::filesystem::path& predictions_manifest,
    const EvalOptions& options) {
  FDIN_ASSIGN_OR_RETURN(DatasetManifest manifest,
                        ReadManifest(predictions_manifest));
  std::map<std::string, const ManifestRecord*> by_id;
  for (const auto& r : manifest.records) by_id[r.clip_id] = &r;
  std::vector<MaskSequence> preds;
  for (const LabeledClip& clip : gt) {
    auto it = by_id.find(clip.clip_id);
    if (it == by_id.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat(predictions_manifest.string(), " has no entry for clip ",
                       clip.clip_id));
    }
    FDIN_ASSIGN_OR_RETURN(LabeledClip loaded, LoadClip(it->second->frame_dir,
                                                       it->second->mask_dir));
    preds.push_back(std::move(loaded.masks));
  }
  return ScorePredictions(gt, preds, options);
}

std::string ReportToNdjson(const MetricsReport& report) {
  std::string out;
  size_t frames = 0;
  for (const ClipMetrics& c : report.clips) {
    frames += c.frame_iou.size();
    absl::StrAppendFormat(
        &out,
        "{\"type\":\"clip\",\"condition\":\"%s\",\"clip_id\":\"%s\","
        "\"miou\":%.17g,\"f1\":%.17g,\"frame_iou\":%s,\"frame_f1\":%s}\n",
        report.condition, c.clip_id, c.miou, c.f1, JsonArray(c.frame_iou),
        JsonArray(c.frame_f1));
  }
  absl::StrAppendFormat(
      &out,
      "{\"type\":\"aggregate\",\"condition\":\"%s\",\"seed\":%d,"
      "\"config_digest\":\"%016x\",\"clips\":%d,\"frames\":%d,"
      "\"miou\":%.17g,\"f1\":%.17g}\n",
      report.condition, report.seed, report.config_digest, report.clips.size(),
      frames, report.miou, report.f1);
  return out;
}

absl::Status WriteReport(const MetricsReport& report,
                         const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write report ", path.string()));
  }
  f << ReportToNdjson(report);
  return f ? absl::OkStatus()
           : absl::DataLossError(
                 absl::StrCat("short write to ", path.string()));
}

std::string ConditionLabel(int qf) {
  return qf == 0 ? "uncompressed" : absl::StrCat("QF", qf);
}

absl::StatusOr<std::vector<int>> RobustnessQfOrder(std::vector<int> qf_list) {
  for (int qf : qf_list) {
    if (qf < 1 || qf > 100) {
      return absl::InvalidArgumentError(
          absl::StrCat("qf_list entries must be in [1,100], got ", qf));
    }
  }
  std::sort(qf_list.begin(), qf_list.end(), std::greater<int>());
  qf_list.erase(std::unique(qf_list.begin(), qf_list.end()), qf_list.end());
  qf_list.insert(qf_list.begin(), 0);
  return qf_list;
}

absl::StatusOr<std::vector<MetricsReport>> RobustnessEval(
    FdinModel<float>& model, const std::vector<LabeledClip>& clips,
    const std::vector<int>& qf_list, const EvalOptions& options) {
  FDIN_ASSIGN_OR_RETURN(std::vector<int> order, RobustnessQfOrder(qf_list));
  std::vector<MetricsReport> reports;
  for (int qf : order) {
    EvalOptions opt = options;
    opt.condition = ConditionLabel(qf);
    std::vector<LabeledClip> degraded = clips;
    if (qf != 0) {
      for (LabeledClip& c : degraded) {
        FDIN_ASSIGN_OR_RETURN(c.clip, RecompressQf(c.clip, qf));
      }
    }
    FDIN_ASSIGN_OR_RETURN(MetricsReport r, Evaluate(model, degraded, opt));
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string RobustnessSummaryTsv(const std::vector<MetricsReport>& reports) {
  std::string out = "condition\tmiou\tf1\n";
  for (const auto& r : reports) {
    absl::StrAppendFormat(&out, "%s\t%.6f\t%.6f\n", r.condition, r.miou, r.f1);
  }
  return out;
}

absl::StatusOr<DatasetManifest> WritePredictions(
    const DatasetManifest& source, const std::vector<MaskSequence>& masks,
    const std::filesystem::path& out_dir) {
  if (source.records.size() != masks.size()) {
    return absl::InvalidArgumentError("one mask sequence per record required");
  }
  DatasetManifest out;
  for (size_t i = 0; i < masks.size(); ++i) {
    const ManifestRecord& src = source.records[i];
    const auto dir = out_dir / src.clip_id;
    std::filesystem::create_directories(dir);
    for (int64_t t = 0; t < masks[i].length(); ++t) {
      FDIN_RETURN_IF_ERROR(WritePng(dir / absl::StrFormat("mask_%05d.png", t),
                                    MaskToImage(masks[i].masks, t)));
    }
    ManifestRecord rec = src;
    rec.frame_dir = std::filesystem::absolute(src.frame_dir);
    rec.mask_dir = src.clip_id;
    rec.frame_count = masks[i].length();
    out.records.push_back(std::move(rec));
  }
  FDIN_RETURN_IF_ERROR(WriteManifest(out, out_dir / "predictions.tsv"));
  return out;
}

}  // namespace fdin
