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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Usage: acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "fdin/absr.h"
#include "fdin/checkpoint.h"
#include "fdin/cli.h"
#include "fdin/encoder.h"
#include "fdin/evaluate.h"
#include "fdin/ffca.h"
#include "fdin/gradcheck.h"
#include "fdin/metrics.h"
#include "fdin/model.h"
#include "fdin/rng.h"
#include "fdin/spectral.h"
#include "fdin/status_macros.h"
#include "fdin/synth.h"
#include "fdin/trainer.h"
#include "json.hpp"
#include "oracles.h"

namespace fdin {
namespace {

namespace fs = std::filesystem;
using oracle::RandomTensor;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict Fail(std::string why) { return {false, std::move(why)}; }

template <typename To, typename From>
Tensor<To> Cast(const Tensor<From>& x) {
  Tensor<To> y(x.shape());
  for (int64_t i = 0; i < x.size(); ++i) y[i] = static_cast<To>(x[i]);
  return y;
}

double SumSquares(const Tensor<double>& t) {
  double s = 0;
  for (double v : t.values()) s += v * v;
  return s;
}

// Runs the CLI with its console output captured.
struct CliRun {
  int code;
  std::string out;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fdin");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = RunCli(int(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str() + err.str()};
}

// ---------------------------------------------------------------- 1

Verdict TransformSuite() {
  Rng rng(101);
  double worst_dct = 0, worst_fft = 0;
  bool saw_w7 = false;
  for (int i = 0; i < 100; ++i) {
    // Every tenth plane has width 7; the rest are random sizes.
    const int h = int(UniformInt(rng, 1, 64));
    const int w = i % 10 == 0 ? 7 : int(UniformInt(rng, 1, 128));
    saw_w7 |= w == 7;
    const auto x = RandomTensor<float>({h, w}, rng, 0.0, 1.0);
    auto s = Dct2(x);
    if (!s.ok()) return Fail(std::string(s.status().message()));
    auto back = Idct2(*s);
    if (!back.ok()) return Fail(std::string(back.status().message()));
    worst_dct = std::max<double>(worst_dct, MaxAbsDiff(x, *back));
  }
  for (int i = 0; i < 100; ++i) {
    const int h = int(UniformInt(rng, 1, 64));
    const int w = i % 10 == 0 ? 7 : int(UniformInt(rng, 1, 128));
    const auto x = RandomTensor<float>({1, h, w}, rng, 0.0, 1.0);
    auto s = RfftSpatial(x);
    if (!s.ok()) return Fail(std::string(s.status().message()));
    auto back = IrfftSpatial(*s, h, w);
    if (!back.ok()) return Fail(std::string(back.status().message()));
    worst_fft = std::max<double>(worst_fft, MaxAbsDiff(x, *back));
  }
  double naive = 0;
  for (int i = 0; i < 10; ++i) {
    const auto x = RandomTensor<double>({4, 4}, rng);
    naive = std::max(naive, MaxAbsDiff(*Dct2(x), oracle::NaiveDct2(x)));
  }
  double parseval = 0;
  for (auto [h, w] : {std::pair{4, 4}, {16, 16}, {9, 7}, {64, 112}}) {
    const auto x = RandomTensor<double>({h, w}, rng);
    const double e = SumSquares(x);
    parseval = std::max(parseval, std::abs(SumSquares(*Dct2(x)) - e) / e);
    const auto v = RandomTensor<double>({1, h, w}, rng);
    const auto s = *RfftSpatial(v);
    const int64_t half = w / 2 + 1;
    double spec = 0;
    for (int64_t k = 0; k < s.real.size(); ++k) {
      spec += HermitianWeight(k % half, w) *
              (s.real[k] * s.real[k] + s.imag[k] * s.imag[k]);
    }
    const double ev = SumSquares(v);
    parseval = std::max(parseval, std::abs(spec - ev) / ev);
  }
  const bool ok = saw_w7 && worst_dct < 1e-6 && worst_fft < 1e-6 &&
                  naive < 1e-10 && parseval < 1e-8;
  return {ok, absl::StrFormat("dct round trip %.2e, rfft round trip %.2e, "
                              "naive 4x4 %.2e, Parseval rel %.2e",
                              worst_dct, worst_fft, naive, parseval)};
}

// ---------------------------------------------------------------- 2

Frame RandomFrame(int h, int w, Rng& rng) {
  return Frame{RandomTensor<float>({3, h, w}, rng, 0.0, 1.0)};
}

Verdict AbsrIdentities() {
  Rng rng(202);
  double ones = 0, zeros = 0, dc = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const int h = trial == 0 ? 64 : int(UniformInt(rng, 2, 40));
    const int w = trial == 0 ? 112 : int(UniformInt(rng, 2, 60));
    const Frame f = RandomFrame(h, w, rng);
    auto a = AbsrForward(f, {Tensor<float>({h, w}, 1.0f)});
    auto z = AbsrForward(f, {Tensor<float>({h, w}, 0.0f)});
    BandSelectionMask dc_mask{Tensor<float>({h, w}, 0.0f)};
    dc_mask.l(0, 0) = 1.0f;
    auto d = AbsrForward(f, dc_mask);
    if (!a.ok() || !z.ok() || !d.ok()) return Fail("ABSR forward failed");
    ones = std::max<double>(ones, MaxAbsDiff(a->pixels, f.pixels));
    for (float v : z->pixels.values())
      zeros = std::max<double>(zeros, std::abs(v));
    const int64_t plane = int64_t(h) * w;
    for (int c = 0; c < 3; ++c) {
      double mean = 0;
      for (int64_t i = 0; i < plane; ++i) mean += f.pixels[c * plane + i];
      mean /= plane;
      for (int64_t i = 0; i < plane; ++i) {
        dc = std::max(dc, std::abs(d->pixels[c * plane + i] - mean));
      }
    }
  }
  return {
      ones < 1e-5 && zeros == 0.0 && dc < 1e-5,
      absl::StrFormat("ones %.2e, zeros %.2e, DC-only %.2e", ones, zeros, dc)};
}

// ---------------------------------------------------------------- 3

Verdict GradientChecks(const fs::path& work) {
  const fs::path out = work / "gradcheck";
  const CliRun run = Cli({"gradcheck", "--output", out.string()});
  if (run.code != kExitOk) {
    return Fail(absl::StrCat("gradcheck exited ", run.code, ": ", run.out));
  }
  std::ifstream in(out / "gradcheck.tsv");
  std::string line;
  std::getline(in, line);  // header
  std::set<std::string> seen;
  double f32 = 0, f64 = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cols = absl::StrSplit(line, '\t');
    if (cols.size() != 5) return Fail("malformed gradcheck.tsv row: " + line);
    if (cols[4] != "PASS") return Fail(cols[0] + " did not pass");
    seen.insert(cols[0]);
    f32 = std::max(f32, std::stod(cols[2]));
    f64 = std::max(f64, std::stod(cols[3]));
  }
  for (const char* m : {"absr", "encoder.resblock", "ffca.gfu", "ffca.fuse"}) {
    if (!seen.count(m)) return Fail(absl::StrCat("module ", m, " not checked"));
  }
  return {f32 < kGradcheckTolF32 && f64 < kGradcheckTolF64,
          absl::StrFormat("%d modules, worst rel err f32 %.2e, f64 %.2e",
                          seen.size(), f32, f64)};
}

// ---------------------------------------------------------------- 4

Tensor<double> IdentityNorm(Tensor<double> x) {
  const double s = 1.0 / std::sqrt(1.0 + BatchNorm3d<double>::kEpsilon);
  for (double& v : x.values()) v *= s;
  return x;
}

Tensor<double> Relu(Tensor<double> x) {
  for (double& v : x.values()) v = std::max(v, 0.0);
  return x;
}

Verdict OracleEquivalence() {
  Rng rng(404);
  double conv_err = 0;
  // Production single-precision layers against the double-precision loops.
  for (int stride : {1, 2}) {
    const int cout = stride == 1 ? 4 : 8;
    ResBlock<float> block(4, cout, stride);
    block.Init(rng);
    const auto x = RandomTensor<float>({2, 4, 6, 6, 6}, rng);
    auto y = block.Forward(x, false);
    if (!y.ok()) return Fail(std::string(y.status().message()));
    const auto xd = Cast<double>(x);
    auto f = Relu(IdentityNorm(oracle::DirectConv3d(
        xd, Cast<double>(block.conv1().weight().value), {}, stride)));
    f = IdentityNorm(oracle::DirectConv3d(
        f, Cast<double>(block.conv2().weight().value), {}, 1));
    Tensor<double> shortcut = xd;
    if (block.has_projection()) {
      const auto& b = block.projection().bias().value;
      shortcut = oracle::DirectConv3d(
          xd, Cast<double>(block.projection().weight().value),
          std::vector<double>(b.values().begin(), b.values().end()), stride);
    }
    f.Axpy(1.0, shortcut);
    conv_err = std::max(conv_err, MaxAbsDiff(Cast<double>(*y), Relu(f)));
  }
  {
    Lfu<float> lfu(4);
    lfu.Init(rng);
    const auto x = RandomTensor<float>({2, 4, 6, 6, 6}, rng);
    auto y = lfu.Forward(x, false);
    if (!y.ok()) return Fail(std::string(y.status().message()));
    const auto want = Relu(IdentityNorm(oracle::DirectConv3d(
        Cast<double>(x), Cast<double>(lfu.conv().weight().value), {}, 1)));
    conv_err = std::max(conv_err, MaxAbsDiff(Cast<double>(*y), want));
  }
  double metric_err = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const double pp = Uniform(rng, 0.0, 1.0), pg = Uniform(rng, 0.0, 1.0);
    MaskSequence p{Tensor<uint8_t>({1, 8, 8})}, g{Tensor<uint8_t>({1, 8, 8})};
    for (auto& v : p.masks.values()) v = Bernoulli(rng, pp);
    for (auto& v : g.masks.values()) v = Bernoulli(rng, pg);
    const auto want = oracle::CountingScores(p.masks, g.masks);
    auto miou = ComputeMiou(p, g);
    auto f1 = ComputeF1(p, g);
    if (!miou.ok() || !f1.ok()) return Fail("metric computation failed");
    metric_err = std::max({metric_err, std::abs(*miou - want.iou[0]),
                           std::abs(*f1 - want.f1[0])});
  }
  return {conv_err < 1e-5 && metric_err < 1e-12,
          absl::StrFormat("conv max diff %.2e, metric max diff %.2e", conv_err,
                          metric_err)};
}

// ---------------------------------------------------------------- 5

Verdict ZeroFuseIdentity() {
  Rng rng(505);
  int checked = 0;
  for (int c : {4, 8, 16, 128}) {
    Ffca<float> ffca({c, 0.5});
    ffca.Init(rng);
    ffca.fuse().weight().value.Fill(0.0f);
    ffca.fuse().bias().value.Fill(0.0f);
    for (bool training : {true, false}) {
      const auto z = RandomTensor<float>({2, c, 3, 4, 7}, rng, -5.0, 5.0);
      auto y = ffca.Forward(z, training);
      if (!y.ok()) return Fail(std::string(y.status().message()));
      if (y->storage() != z.storage()) {
        return Fail(absl::StrCat("not exact at C=", c, " training=", training,
                                 ", max diff ", MaxAbsDiff(*y, z)));
      }
      ++checked;
    }
  }
  return {true, absl::StrCat(checked, " random inputs reproduced bit for bit")};
}

// ---------------------------------------------------------------- 6, 10

struct OverfitRun {
  std::vector<StepRecord> log;
  double miou = 0, f1 = 0;
  double seconds = 0;
};

// Pure memorization: no flips, and the rate halves for the last 100 steps
// (four windows per epoch at batch 1).
TrainConfig OverfitTrainConfig() {
  TrainConfig t;
  t.learning_rate = 1e-3;
  t.batch_size = 1;
  t.max_steps = 500;
  t.epochs = 125;
  t.lr_halve_epoch = 100;
  t.flip_prob = 0.0;
  t.seed = 0;
  return t;
}

absl::StatusOr<OverfitRun> RunOverfit(const std::vector<LabeledClip>& clips,
                                      const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  OverfitRun run;
  FDIN_ASSIGN_OR_RETURN(TrainResult result,
                        Train(clips, OverfitTrainConfig(), ModelConfig{}, out,
                              /*overwrite=*/true));
  EvalOptions opt;
  FDIN_ASSIGN_OR_RETURN(MetricsReport report,
                        Evaluate(*result.model, clips, opt));
  run.log = std::move(result.log);
  run.miou = report.miou;
  run.f1 = report.f1;
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return run;
}

struct Shared {
  fs::path work;
  fs::path data_manifest;
  std::vector<LabeledClip> clips;
  std::optional<OverfitRun> overfit;
};

absl::Status PrepareOverfitData(Shared& s) {
  SynthOptions o;  // four 64x112 clips of eight frames, blur_fill, seed 0
  FDIN_ASSIGN_OR_RETURN(DatasetManifest m, SynthGenerate(o, s.work / "data"));
  s.data_manifest = s.work / "data" / "manifest.tsv";
  FDIN_ASSIGN_OR_RETURN(s.clips, LoadDataset(m, 0));
  return absl::OkStatus();
}

Verdict Overfit(Shared& s) {
  auto run = RunOverfit(s.clips, s.work / "overfit");
  if (!run.ok()) return Fail(std::string(run.status().message()));
  s.overfit = *run;
  const bool ok =
      run->log.size() <= 500 && run->miou >= 0.90 && run->f1 >= 0.90;
  return {ok, absl::StrFormat("%d steps, final loss %.4f, mIoU %.4f, F1 %.4f",
                              run->log.size(), run->log.back().loss, run->miou,
                              run->f1)};
}

Verdict Determinism(Shared& s) {
  if (!s.overfit) return Fail("criterion 6 did not produce a run to compare");
  auto again = RunOverfit(s.clips, s.work / "overfit_repeat");
  if (!again.ok()) return Fail(std::string(again.status().message()));
  const auto& a = s.overfit->log;
  const auto& b = again->log;
  if (a.size() != b.size()) return Fail("step counts differ");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].loss != b[i].loss) {
      return Fail(absl::StrFormat("loss differs at step %d: %.17g vs %.17g",
                                  i + 1, a[i].loss, b[i].loss));
    }
  }
  const bool ok = s.overfit->miou == again->miou && s.overfit->f1 == again->f1;
  return {ok, absl::StrFormat("%d identical losses; mIoU %.17g vs %.17g, "
                              "F1 %.17g vs %.17g",
                              a.size(), s.overfit->miou, again->miou,
                              s.overfit->f1, again->f1)};
}

// ---------------------------------------------------------------- 7

double MeanLoss(const std::vector<StepRecord>& log, size_t begin, size_t end) {
  double sum = 0;
  for (size_t i = begin; i < end; ++i) sum += log[i].loss;
  return sum / double(end - begin);
}

Verdict Ablations(const Shared& s) {
  std::string detail;
  bool ok = true;
  for (bool absr : {true, false}) {
    for (bool ffca : {true, false}) {
      ModelConfig mc;
      mc.enable_absr = absr;
      mc.enable_ffca = ffca;
      TrainConfig t = OverfitTrainConfig();
      t.max_steps = 20;
      auto r = Train(s.clips, t, mc, "", false);
      if (!r.ok()) return Fail(std::string(r.status().message()));
      if (r->log.size() != 20) return Fail("expected 20 steps");
      bool finite = true;
      for (const auto& rec : r->log) finite &= std::isfinite(rec.loss);
      const double first = MeanLoss(r->log, 0, 5),
                   last = MeanLoss(r->log, 15, 20);
      ok &= finite && last < first;
      absl::StrAppendFormat(&detail, "%sabsr=%d ffca=%d %.3f->%.3f",
                            detail.empty() ? "" : "; ", absr, ffca, first,
                            last);
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 8

Verdict LrSchedule(const Shared& s) {
  const fs::path data = s.work / "lr_data";
  SynthOptions o;
  o.n_clips = 1;
  o.height = o.width = 16;
  const std::vector<std::string> tiny = {
      "--set", "height=16",       "--set", "width=16",
      "--set", "stem_channels=4", "--set", "stage_channels=4,8"};
  auto manifest = SynthGenerate(o, data);
  if (!manifest.ok()) return Fail(std::string(manifest.status().message()));
  std::vector<std::string> args = {
      "train",    "--overwrite",
      "--output", (s.work / "lr_run").string(),
      "--set",    "manifest=" + (data / "manifest.tsv").string(),
      "--set",    "batch_size=1"};
  args.insert(args.end(), tiny.begin(), tiny.end());
  const CliRun run = Cli(args);
  if (run.code != kExitOk) return Fail("train exited non-zero: " + run.out);
  std::ifstream in(s.work / "lr_run" / kTrainLogFile);
  std::string line;
  std::set<int> epochs;
  int bad = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    const int epoch = rec["epoch"];
    const double want = epoch <= 10 ? 1e-4 : 5e-5;
    bad += rec["lr"].get<double>() != want;
    epochs.insert(epoch);
  }
  const bool ok = bad == 0 && epochs.size() == 20 && *epochs.begin() == 1 &&
                  *epochs.rbegin() == 20;
  return {ok, absl::StrFormat("%d epochs logged, %d records off schedule",
                              epochs.size(), bad)};
}

// ---------------------------------------------------------------- 9

Verdict Robustness(const Shared& s) {
  const fs::path ckpt = s.work / "overfit" / kCheckpointFile;
  if (!fs::exists(ckpt)) return Fail("criterion 6 checkpoint missing");
  const fs::path out = s.work / "robustness";
  const CliRun run = Cli({"robustness", "--output", out.string(), "--set",
                          "manifest=" + s.data_manifest.string(), "--set",
                          "checkpoint=" + ckpt.string()});
  if (run.code != kExitOk)
    return Fail("robustness exited non-zero: " + run.out);
  std::map<std::string, double> miou;
  for (const char* cond : {"uncompressed", "QF90", "QF70"}) {
    std::ifstream in(out / absl::StrCat("report_", cond, ".ndjson"));
    if (!in) return Fail(absl::StrCat("missing report for ", cond));
    std::string line;
    bool aggregate = false;
    while (std::getline(in, line)) {
      const auto rec = nlohmann::json::parse(line);
      if (rec["condition"] != cond) return Fail("mislabeled report");
      for (const char* key : {"miou", "f1"}) {
        const double v = rec[key];
        if (!(v >= 0.0 && v <= 1.0)) return Fail("metric outside [0,1]");
      }
      if (rec["type"] == "aggregate") {
        aggregate = true;
        miou[cond] = rec["miou"];
      }
    }
    if (!aggregate) return Fail(absl::StrCat(cond, " has no aggregate row"));
  }
  const bool ok = miou["uncompressed"] >= miou["QF70"] - 0.05;
  return {ok,
          absl::StrFormat("mIoU uncompressed %.4f, QF90 %.4f, QF70 %.4f",
                          miou["uncompressed"], miou["QF90"], miou["QF70"])};
}

}  // namespace
}  // namespace fdin

int main(int argc, char** argv) {
  using namespace fdin;
  Shared shared;
  shared.work = argc > 1 ? fs::path(argv[1])
                         : fs::temp_directory_path() / "fdin_acceptance";
  fs::remove_all(shared.work);
  fs::create_directories(shared.work);
  if (auto st = PrepareOverfitData(shared); !st.ok()) {
    std::fprintf(stderr, "cannot prepare data: %s\n",
                 std::string(st.message()).c_str());
    return 2;
  }

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no limit
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "transform suite", 30, TransformSuite},
      {2, "ABSR identities", 10, AbsrIdentities},
      {3, "gradient checks", 120, [&] { return GradientChecks(shared.work); }},
      {4, "oracle equivalence", 120, OracleEquivalence},
      {5, "zero-fuse identity", 0, ZeroFuseIdentity},
      {6, "overfit", 900, [&] { return Overfit(shared); }},
      {7, "ablation runnability", 0, [&] { return Ablations(shared); }},
      {8, "LR schedule", 0, [&] { return LrSchedule(shared); }},
      {9, "robustness harness", 600, [&] { return Robustness(shared); }},
      {10, "determinism", 0, [&] { return Determinism(shared); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      v.pass = false;
      v.detail += absl::StrFormat("; over the %.0f s limit", c.limit_seconds);
    }
    failures += !v.pass;
    std::printf("%s  criterion %2d  %-22s %7.1f s  %s\n",
                v.pass ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
