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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "fdin/gradcheck.h"
#include "gtest/gtest.h"

namespace fdin {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fdin");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = RunCli(int(argv.size()), argv.data());
  CliRun r{code, ::testing::internal::GetCapturedStdout(),
           ::testing::internal::GetCapturedStderr()};
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const std::vector<std::string> kTiny = {"--set", "height=16",
                                        "--set", "width=16",
                                        "--set", "stem_channels=4",
                                        "--set", "stage_channels=4,8",
                                        "--set", "t_c=8",
                                        "--set", "epochs=1",
                                        "--set", "lr_halve_epoch=1",
                                        "--set", "batch_size=2"};

std::vector<std::string> With(std::vector<std::string> head,
                              const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::path(::testing::TempDir()) / "fdin_cli";
    fs::remove_all(root_);
    const CliRun synth =
        Invoke(With({"synth", "--output", (root_ / "data").string(), "--set",
                     "n_clips=2", "--set", "frames=10"},
                    kTiny));
    ASSERT_EQ(synth.code, kExitOk) << synth.err;
    const CliRun train =
        Invoke(With({"train", "--output", (root_ / "run").string(), "--set",
                     "manifest=" + (root_ / "data" / "manifest.tsv").string()},
                    kTiny));
    ASSERT_EQ(train.code, kExitOk) << train.err;
  }

  static std::string Manifest() {
    return "manifest=" + (root_ / "data" / "manifest.tsv").string();
  }
  static std::string Checkpoint() {
    return "checkpoint=" + (root_ / "run" / "checkpoint.fdin").string();
  }

  static fs::path root_;
};

fs::path CliTest::root_;

TEST_F(CliTest, SynthRerunIsByteIdentical) {
  const fs::path again = root_ / "data2";
  ASSERT_EQ(Invoke(With({"synth", "--output", again.string(), "--set",
                         "n_clips=2", "--set", "frames=10"},
                        kTiny))
                .code,
            kExitOk);
  for (const char* rel :
       {"clip_0000/frames/frame_00003.png", "clip_0001/masks/mask_00009.png"}) {
    EXPECT_EQ(Slurp(root_ / "data" / rel), Slurp(again / rel)) << rel;
  }
}

TEST_F(CliTest, SynthRejectsTinyFramesBeforeWriting) {
  const fs::path out = root_ / "tiny";
  const CliRun r =
      Invoke({"synth", "--output", out.string(), "--set", "height=8"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("16"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, InvalidMethodListsValidNames) {
  const CliRun r = Invoke(
      {"synth", "--output", (root_ / "m").string(), "--set", "method=smudge"});
  EXPECT_EQ(r.code, kExitValidation);
  for (const char* name : {"blur_fill", "diffusion_fill", "temporal_copy"}) {
    EXPECT_NE(r.err.find(name), std::string::npos) << r.err;
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitValidation);
  EXPECT_EQ(Invoke({"dance"}).code, kExitValidation);
  EXPECT_EQ(Invoke({"train", "--output", (root_ / "x").string()}).code,
            kExitValidation);
  EXPECT_EQ(Invoke({"eval", "--set", "bogus_key=1"}).code, kExitValidation);
}

TEST_F(CliTest, TrainRefusesOverwrite) {
  const CliRun r = Invoke(
      With({"train", "--output", (root_ / "run").string(), "--set", Manifest()},
           kTiny));
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("--overwrite"), std::string::npos);
}

TEST_F(CliTest, InferWritesEveryFrameAndEvalScoresIt) {
  const fs::path pred = root_ / "pred";
  const CliRun infer = Invoke(With({"infer", "--output", pred.string(), "--set",
                                    Manifest(), "--set", Checkpoint()},
                                   kTiny));
  ASSERT_EQ(infer.code, kExitOk) << infer.err;
  EXPECT_NE(infer.out.find("masks written: 20"), std::string::npos);
  int masks = 0;
  for (const auto& e : fs::directory_iterator(pred / "clip_0000")) {
    masks += e.path().extension() == ".png";
  }
  EXPECT_EQ(masks, 10);

  const CliRun eval = Invoke(
      With({"eval", "--output", (root_ / "ev").string(), "--set", Manifest(),
            "--set", "predictions=" + (pred / "predictions.tsv").string()},
           kTiny));
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_TRUE(fs::exists(root_ / "ev" / "report.ndjson"));
}

TEST_F(CliTest, GroundTruthAsPredictionsScoresOne) {
  const CliRun eval = Invoke(With(
      {"eval", "--output", (root_ / "gt").string(), "--set", Manifest(),
       "--set", "predictions=" + (root_ / "data" / "manifest.tsv").string()},
      kTiny));
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_NE(eval.out.find("miou: 1.000000"), std::string::npos) << eval.out;
  EXPECT_NE(eval.out.find("f1: 1.000000"), std::string::npos);
}

TEST_F(CliTest, RobustnessWritesThreeReports) {
  const fs::path out = root_ / "rob";
  const CliRun r = Invoke(With({"robustness", "--output", out.string(), "--set",
                                Manifest(), "--set", Checkpoint()},
                               kTiny));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* c : {"uncompressed", "QF90", "QF70"}) {
    EXPECT_TRUE(fs::exists(out / (std::string("report_") + c + ".ndjson")));
  }
  EXPECT_TRUE(fs::exists(out / "summary.tsv"));
  EXPECT_TRUE(fs::exists(out / "robustness.png"));
}

TEST_F(CliTest, ExportBandMask) {
  const CliRun r = Invoke(
      {"export-l", "--output", (root_ / "l").string(), "--set", Checkpoint()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(root_ / "l" / "band_mask.png"));
}

TEST_F(CliTest, MissingCheckpointIsValidationError) {
  const CliRun r =
      Invoke({"eval", "--output", (root_ / "e2").string(), "--set", Manifest(),
              "--set", "checkpoint=/nonexistent.fdin"});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST_F(CliTest, GradcheckListsEveryModuleOnce) {
  const CliRun r = Invoke({"gradcheck"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const std::string& m : GradcheckModules()) {
    const std::string row = "\n" + m + "\t";
    const size_t first = r.out.find(row);
    ASSERT_NE(first, std::string::npos) << m;
    EXPECT_EQ(r.out.find(row, first + 1), std::string::npos) << m;
  }
}

TEST_F(CliTest, CorruptedGradientFailsAndNamesModule) {
  const CliRun r = Invoke({"gradcheck", "--set", "gradcheck_corrupt=absr"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("absr"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(Invoke({"gradcheck", "--set", "gradcheck_corrupt=nope"}).code,
            kExitValidation);
}

}  // namespace
}  // namespace fdin
