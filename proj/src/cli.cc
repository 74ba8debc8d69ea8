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

#include "fdin/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "fdin/blas.h"
#include "fdin/checkpoint.h"
#include "fdin/evaluate.h"
#include "fdin/gradcheck.h"
#include "fdin/plot.h"
#include "fdin/run_config.h"
#include "fdin/synth.h"
#include "fdin/trainer.h"

namespace fdin {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  std::string output;
  bool overwrite = false;
  std::optional<uint64_t> seed;
};

// Distinguishes bad input (exit 1) from failures while working (exit 2).
struct Outcome {
  int code = kExitOk;
  absl::Status status;
};

Outcome Invalid(absl::Status s) { return {kExitValidation, std::move(s)}; }
Outcome Failed(absl::Status s) { return {kExitRuntime, std::move(s)}; }
Outcome Ok() { return {}; }

#define FDIN_CLI_VALIDATE(expr)                  \
  do {                                           \
    absl::Status _s = (expr);                    \
    if (!_s.ok()) return Invalid(std::move(_s)); \
  } while (0)

#define FDIN_CLI_RUN(expr)                      \
  do {                                          \
    absl::Status _s = (expr);                   \
    if (!_s.ok()) return Failed(std::move(_s)); \
  } while (0)

absl::Status RequirePath(const std::string& key, const std::string& value,
                         bool must_exist = true) {
  if (value.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "' is required"));
  }
  if (must_exist && !fs::exists(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': ", value, " does not exist"));
  }
  return absl::OkStatus();
}

absl::Status RequireOutput(const Flags& flags) {
  if (flags.output.empty()) {
    return absl::InvalidArgumentError("--output DIR is required");
  }
  return absl::OkStatus();
}

absl::Status WriteText(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write ", path.string()));
  }
  return absl::OkStatus();
}

// Records the effective configuration next to the outputs.
absl::Status EchoConfig(const std::string& command, const RunConfig& config,
                        const Flags& flags) {
  if (flags.output.empty()) return absl::OkStatus();
  std::error_code ec;
  fs::create_directories(flags.output, ec);
  if (ec) {
    return absl::PermissionDeniedError(absl::StrCat(
        "cannot create output directory ", flags.output, ": ", ec.message()));
  }
  return WriteText(
      fs::path(flags.output) / absl::StrCat(command, "_config.txt"),
      absl::StrFormat("# fdin %s, config digest %016x\n%s", command,
                      RunConfigDigest(config), EffectiveConfigText(config)));
}

absl::StatusOr<std::vector<LabeledClip>> LoadClips(const RunConfig& config) {
  FDIN_ASSIGN_OR_RETURN(DatasetManifest manifest,
                        ReadManifest(config.manifest));
  return LoadDataset(manifest, config.train.workers);
}

EvalOptions EvalOptionsFor(const RunConfig& config) {
  EvalOptions o;
  o.t_c = config.train.t_c;
  o.threshold = config.threshold;
  o.seed = config.train.seed;
  o.config_digest = RunConfigDigest(config);
  return o;
}

absl::Status ValidateThreshold(double threshold) {
  if (threshold > 0.0 && threshold < 1.0) return absl::OkStatus();
  return absl::InvalidArgumentError(
      absl::StrCat("config key 'threshold' must be in (0,1), got ", threshold));
}

Outcome CmdSynth(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  SynthOptions o;
  o.seed = config.train.seed;
  o.n_clips = config.n_clips;
  o.frames = config.frames;
  o.height = config.model.height;
  o.width = config.model.width;
  o.method = config.method;
  FDIN_CLI_VALIDATE(ValidateSynthOptions(o));
  FDIN_CLI_VALIDATE(EchoConfig("synth", config, flags));
  auto manifest = SynthGenerate(o, flags.output);
  if (!manifest.ok()) return Failed(manifest.status());
  std::cout << "manifest: "
            << (fs::path(flags.output) / "manifest.tsv").string()
            << "\nclips: " << manifest->records.size() << "\n";
  return Ok();
}

Outcome CmdTrain(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  FDIN_CLI_VALIDATE(RequirePath("manifest", config.manifest));
  FDIN_CLI_VALIDATE(ValidateTrainConfig(config.train));
  FDIN_CLI_VALIDATE(ValidateModelConfig(config.model));
  if (!config.train.pretrained_weights.empty()) {
    FDIN_CLI_VALIDATE(
        RequirePath("pretrained_weights", config.train.pretrained_weights));
  }
  const fs::path out(flags.output);
  if (!flags.overwrite &&
      (fs::exists(out / kCheckpointFile) || fs::exists(out / kTrainLogFile))) {
    return Invalid(absl::AlreadyExistsError(
        absl::StrCat("a training run already exists in ", out.string(),
                     "; pass --overwrite to replace it")));
  }
  FDIN_CLI_VALIDATE(EchoConfig("train", config, flags));
  auto clips = LoadClips(config);
  if (!clips.ok()) return Failed(clips.status());
  auto result = Train(*clips, config.train, config.model, out, true);
  if (!result.ok()) return Failed(result.status());
  const auto& log = result->log;
  std::cout << "steps: " << log.size() << "\n";
  if (!log.empty()) {
    std::cout << absl::StrFormat("final loss: %.6f\n", log.back().loss);
  }
  std::cout << "checkpoint: " << (out / kCheckpointFile).string() << "\n";
  return Ok();
}

Outcome CmdEval(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  FDIN_CLI_VALIDATE(RequirePath("manifest", config.manifest));
  FDIN_CLI_VALIDATE(ValidateThreshold(config.threshold));
  if (config.predictions.empty()) {
    FDIN_CLI_VALIDATE(RequirePath("checkpoint", config.checkpoint));
  } else {
    FDIN_CLI_VALIDATE(RequirePath("predictions", config.predictions));
  }
  FDIN_CLI_VALIDATE(EchoConfig("eval", config, flags));
  auto clips = LoadClips(config);
  if (!clips.ok()) return Failed(clips.status());
  EvalOptions opt = EvalOptionsFor(config);
  absl::StatusOr<MetricsReport> report;
  if (!config.predictions.empty()) {
    opt.condition = "predictions";
    report = EvaluatePredictionManifest(*clips, config.predictions, opt);
  } else {
    auto model = LoadCheckpoint(config.checkpoint);
    if (!model.ok()) return Failed(model.status());
    report = Evaluate(**model, *clips, opt);
  }
  if (!report.ok()) return Failed(report.status());
  const fs::path path = fs::path(flags.output) / "report.ndjson";
  FDIN_CLI_RUN(WriteReport(*report, path));
  std::cout << absl::StrFormat("miou: %.6f\nf1: %.6f\nreport: %s\n",
                               report->miou, report->f1, path.string());
  return Ok();
}

Outcome CmdInfer(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  FDIN_CLI_VALIDATE(RequirePath("manifest", config.manifest));
  FDIN_CLI_VALIDATE(RequirePath("checkpoint", config.checkpoint));
  FDIN_CLI_VALIDATE(ValidateThreshold(config.threshold));
  FDIN_CLI_VALIDATE(EchoConfig("infer", config, flags));
  auto manifest = ReadManifest(config.manifest);
  if (!manifest.ok()) return Failed(manifest.status());
  auto clips = LoadDataset(*manifest, config.train.workers);
  if (!clips.ok()) return Failed(clips.status());
  auto model = LoadCheckpoint(config.checkpoint);
  if (!model.ok()) return Failed(model.status());
  auto masks = PredictMasks(**model, *clips, EvalOptionsFor(config));
  if (!masks.ok()) return Failed(masks.status());
  auto written = WritePredictions(*manifest, *masks, flags.output);
  if (!written.ok()) return Failed(written.status());
  int64_t frames = 0;
  for (const auto& m : *masks) frames += m.length();
  std::cout << "predictions: "
            << (fs::path(flags.output) / "predictions.tsv").string()
            << "\nmasks written: " << frames << "\n";
  return Ok();
}

Outcome CmdRobustness(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  FDIN_CLI_VALIDATE(RequirePath("manifest", config.manifest));
  FDIN_CLI_VALIDATE(RequirePath("checkpoint", config.checkpoint));
  FDIN_CLI_VALIDATE(ValidateThreshold(config.threshold));
  FDIN_CLI_VALIDATE(RobustnessQfOrder(config.qf_list).status());
  FDIN_CLI_VALIDATE(EchoConfig("robustness", config, flags));
  auto clips = LoadClips(config);
  if (!clips.ok()) return Failed(clips.status());
  auto model = LoadCheckpoint(config.checkpoint);
  if (!model.ok()) return Failed(model.status());
  auto reports =
      RobustnessEval(**model, *clips, config.qf_list, EvalOptionsFor(config));
  if (!reports.ok()) return Failed(reports.status());
  const fs::path out(flags.output);
  std::vector<std::string> labels;
  PlotSeries miou{"mIoU", {}}, f1{"F1", {}};
  for (const MetricsReport& r : *reports) {
    FDIN_CLI_RUN(
        WriteReport(r, out / absl::StrCat("report_", r.condition, ".ndjson")));
    labels.push_back(r.condition);
    miou.values.push_back(r.miou);
    f1.values.push_back(r.f1);
  }
  const std::string table = RobustnessSummaryTsv(*reports);
  FDIN_CLI_RUN(WriteText(out / "summary.tsv", table));
  FDIN_CLI_RUN(WriteBarChart(out / "robustness.png", "Detection vs compression",
                             labels, {miou, f1}));
  std::cout << table;
  return Ok();
}

Outcome CmdGradcheck(const RunConfig& config, const Flags& flags) {
  const auto modules = GradcheckModules();
  if (!config.gradcheck_corrupt.empty() &&
      std::find(modules.begin(), modules.end(), config.gradcheck_corrupt) ==
          modules.end()) {
    return Invalid(absl::InvalidArgumentError(
        absl::StrCat("config key 'gradcheck_corrupt' must be one of: ",
                     absl::StrJoin(modules, ", "))));
  }
  FDIN_CLI_VALIDATE(EchoConfig("gradcheck", config, flags));
  const auto results =
      RunGradchecks({config.train.seed, config.gradcheck_corrupt});
  std::string table =
      "module\tentries\tmax_rel_err_f32\tmax_rel_err_f64\tresult\n";
  std::vector<std::string> failed;
  for (const auto& r : results) {
    absl::StrAppendFormat(&table, "%s\t%d\t%.3e\t%.3e\t%s\n", r.module,
                          r.entries, r.max_rel_error_f32, r.max_rel_error_f64,
                          r.pass ? "PASS" : "FAIL");
    if (!r.pass) failed.push_back(r.module);
  }
  std::cout << table;
  if (!flags.output.empty()) {
    FDIN_CLI_RUN(WriteText(fs::path(flags.output) / "gradcheck.tsv", table));
  }
  if (!failed.empty()) {
    return Invalid(absl::InternalError(absl::StrCat(
        "gradient check failed for: ", absl::StrJoin(failed, ", "))));
  }
  return Ok();
}

Outcome CmdExportL(const RunConfig& config, const Flags& flags) {
  FDIN_CLI_VALIDATE(RequireOutput(flags));
  FDIN_CLI_VALIDATE(RequirePath("checkpoint", config.checkpoint));
  FDIN_CLI_VALIDATE(EchoConfig("export-l", config, flags));
  auto model = LoadCheckpoint(config.checkpoint);
  if (!model.ok()) return Failed(model.status());
  if (!(*model)->config().enable_absr) {
    return Failed(absl::FailedPreconditionError(
        "checkpoint was trained with enable_absr=false; it has no L"));
  }
  const Tensor<float>& l = (*model)->absr().band_mask().value;
  const int planes = l.dim(0), h = l.dim(1), w = l.dim(2);
  float lo = l[0], hi = l[0];
  for (int64_t i = 0; i < l.size(); ++i) {
    lo = std::min(lo, l[i]);
    hi = std::max(hi, l[i]);
  }
  // Per-channel masks are tiled left to right.
  Image8 img{w * planes, h, 1, std::vector<uint8_t>(size_t(w) * planes * h)};
  const float range = hi > lo ? hi - lo : 1.0f;
  for (int p = 0; p < planes; ++p) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float v = (l[(int64_t(p) * h + y) * w + x] - lo) / range;
        img.pixels[size_t(y) * img.width + p * w + x] =
            static_cast<uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  const fs::path path = fs::path(flags.output) / "band_mask.png";
  FDIN_CLI_RUN(WritePng(path, img));
  std::cout << absl::StrFormat("L range: [%g, %g]\nimage: %s\n", lo, hi,
                               path.string());
  return Ok();
}

void AddCommonFlags(CLI::App* cmd, Flags* flags) {
  cmd->add_option("--config", flags->config, "Key-value config file");
  cmd->add_option("--set", flags->sets, "Override one key: key=value")
      ->allow_extra_args(false);
  cmd->add_option("--output", flags->output, "Output directory");
  cmd->add_flag("--overwrite", flags->overwrite,
                "Replace an existing training run");
  cmd->add_option("--seed", flags->seed, "Shorthand for --set seed=N");
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"FDIN video inpainting detection"};
  app.require_subcommand(1);
  Flags flags;
  using Handler = Outcome (*)(const RunConfig&, const Flags&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"synth", "Generate a synthetic inpainting dataset", CmdSynth},
      {"train", "Train a model on a manifest", CmdTrain},
      {"eval", "Score a checkpoint or a predictions manifest", CmdEval},
      {"infer", "Write predicted masks for every frame", CmdInfer},
      {"robustness", "Evaluate under JPEG recompression", CmdRobustness},
      {"gradcheck", "Finite-difference gradient checks", CmdGradcheck},
      {"export-l", "Write the learned band mask as an image", CmdExportL},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, handler] : commands) {
    subs.push_back(app.add_subcommand(name, help));
    AddCommonFlags(subs.back(), &flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  SetNumThreads(0);
  std::vector<std::string> overrides = flags.sets;
  if (flags.seed) overrides.push_back(absl::StrCat("seed=", *flags.seed));
  auto config = LoadRunConfig(flags.config, overrides);
  if (!config.ok()) {
    std::cerr << "error: " << config.status().message() << "\n";
    return kExitValidation;
  }
  for (size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const Outcome outcome = std::get<2>(commands[i])(*config, flags);
    if (outcome.code != kExitOk) {
      std::cerr << "error: " << outcome.status.message() << "\n";
    }
    return outcome.code;
  }
  return kExitValidation;
}

}  // namespace fdin
