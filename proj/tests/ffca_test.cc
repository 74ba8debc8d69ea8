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

#include "fdin/ffca.h"

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.h"

namespace fdin {
namespace {

using oracle::RandomTensor;

TEST(BranchSizesTest, Examples) {
  EXPECT_EQ(*BranchSizes(128, 0.5), std::make_pair(64, 64));
  EXPECT_EQ(*BranchSizes(8, 0.25), std::make_pair(6, 2));
  EXPECT_FALSE(BranchSizes(2, 0.9).ok());
  EXPECT_FALSE(BranchSizes(1, 0.5).ok());
  EXPECT_FALSE(BranchSizes(8, 0.0).ok());
  EXPECT_FALSE(BranchSizes(8, 1.0).ok());
  EXPECT_FALSE(Ffca<float>::Create({2, 0.9}).ok());
}

TEST(SplitBranchesTest, ConcatRestoresInput) {
  Rng rng(1);
  const auto z = RandomTensor<float>({2, 6, 2, 3, 3}, rng);
  const auto split = *SplitBranches(z, 0.5);
  EXPECT_EQ(split.z_local.dim(1), 3);
  EXPECT_EQ(split.z_global.dim(1), 3);
  EXPECT_EQ(ConcatChannels(split.z_local, split.z_global).storage(),
            z.storage());
}

TEST(LfuTest, ZeroWeightsGiveZeroOutput) {
  Rng rng(2);
  Lfu<float> lfu(4);
  const auto x = RandomTensor<float>({2, 4, 2, 5, 5}, rng);
  for (bool training : {true, false}) {
    const auto y = *lfu.Forward(x, training);
    EXPECT_EQ(y.shape(), x.shape());
    for (float v : y.values()) ASSERT_EQ(v, 0.0f);
  }
}

TEST(LfuTest, MatchesDirectConvolutionBeforeNonlinearity) {
  Rng rng(3);
  Lfu<double> lfu(4);
  lfu.Init(rng);
  const auto x = RandomTensor<double>({2, 4, 1, 5, 5}, rng);
  const auto pre = lfu.conv().Forward(x);
  const auto want = oracle::DirectConv3d(x, lfu.conv().weight().value, {}, 1);
  EXPECT_LT(MaxAbsDiff(pre, want), 1e-5);
  // Full unit in inference mode with identity statistics.
  const auto y = *lfu.Forward(x, false);
  const double s = 1.0 / std::sqrt(1.0 + BatchNorm3d<double>::kEpsilon);
  for (int64_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(y[i], std::max(0.0, want[i] * s), 1e-5);
  }
}

TEST(LfuTest, LocalReceptiveField) {
  Rng rng(4);
  Lfu<double> lfu(2);
  lfu.Init(rng);
  auto x = RandomTensor<double>({1, 2, 5, 7, 7}, rng);
  const auto base = *lfu.Forward(x, false);
  x(0, 1, 2, 3, 3) += 1.0;
  const auto moved = *lfu.Forward(x, false);
  for (int c = 0; c < 2; ++c)
    for (int t = 0; t < 5; ++t)
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
          const bool near = std::abs(t - 2) <= 1 && std::abs(i - 3) <= 1 &&
                            std::abs(j - 3) <= 1;
          if (!near) {
            EXPECT_EQ(moved(0, c, t, i, j), base(0, c, t, i, j));
          }
        }
}

TEST(GfuTest, ZeroSpectralWeightsGiveZeroOutput) {
  Rng rng(5);
  Gfu<double> gfu(3);
  const auto x = RandomTensor<double>({2, 3, 2, 6, 7}, rng);
  const auto y = *gfu.Forward(x, true);
  EXPECT_EQ(y.shape(), x.shape());
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(GfuTest, PreservesShapeForOddWidth) {
  Rng rng(6);
  Gfu<float> gfu(2);
  gfu.Init(rng);
  const auto x = RandomTensor<float>({1, 2, 3, 5, 7}, rng);
  const auto y = *gfu.Forward(x, true);
  EXPECT_EQ(y.shape(), x.shape());
  EXPECT_TRUE(AllFinite(y));
}

TEST(GfuTest, GlobalReceptiveField) {
  Rng rng(7);
  Gfu<double> gfu(3);
  gfu.Init(rng);
  for (double& v : gfu.norm().beta().value.values()) v = 0.5;
  auto x = RandomTensor<double>({1, 3, 2, 8, 9}, rng);
  const auto base = *gfu.Forward(x, false);
  x(0, 1, 1, 2, 5) += 1.0;
  const auto moved = *gfu.Forward(x, false);
  int changed = 0, total = 0;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 9; ++j, ++total) {
        changed += std::abs(moved(0, c, 1, i, j) - base(0, c, 1, i, j)) > 1e-9;
      }
  EXPECT_GE(changed, 0.99 * total);
}

TEST(GfuTest, SpectralKernelGradientMatchesFiniteDifferences) {
  Rng rng(8);
  Gfu<double> gfu(2);
  gfu.Init(rng);
  const auto x = RandomTensor<double>({1, 2, 2, 6, 7}, rng);
  const auto r = RandomTensor<double>(x.shape(), rng);
  ParamSet<double> params;
  gfu.Collect("gfu", &params);
  params.ZeroGrad();
  (void)*gfu.Forward(x, true);
  gfu.Backward(r);
  Tensor<double>& w = gfu.spectral_conv().weight().value;
  const Tensor<double>& g = gfu.spectral_conv().weight().grad;
  const double h = 1e-6;
  for (int64_t i = 0; i < w.size(); i += 3) {
    const double keep = w[i];
    w[i] = keep + h;
    const double up = Dot(*gfu.Forward(x, true), r);
    w[i] = keep - h;
    const double down = Dot(*gfu.Forward(x, true), r);
    w[i] = keep;
    const double fd = (up - down) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << "entry " << i;
  }
}

TEST(FfcaTest, ZeroFuseIsExactlyTheIdentity) {
  Rng rng(9);
  Ffca<float> ffca({8, 0.5});
  ffca.Init(rng);
  ffca.fuse().weight().value.Fill(0.0f);
  ffca.fuse().bias().value.Fill(0.0f);
  for (int trial = 0; trial < 5; ++trial) {
    const auto z = RandomTensor<float>({2, 8, 3, 4, 5}, rng, -3.0, 3.0);
    EXPECT_EQ(ffca.Forward(z, true)->storage(), z.storage());
    EXPECT_EQ(ffca.Forward(z, false)->storage(), z.storage());
  }
}

TEST(FfcaTest, PreservesShape) {
  Rng rng(10);
  for (auto [c, t, h, w] :
       {std::array{4, 1, 3, 3}, {6, 2, 4, 7}, {10, 3, 2, 5}}) {
    Ffca<float> ffca({c, 0.5});
    ffca.Init(rng);
    const auto z = RandomTensor<float>({1, c, t, h, w}, rng);
    EXPECT_EQ(ffca.Forward(z, true)->shape(), z.shape());
  }
}

TEST(FfcaTest, RejectsWrongChannelCount) {
  Ffca<float> ffca({8, 0.5});
  EXPECT_FALSE(ffca.Forward(Tensor<float>({1, 6, 1, 2, 2}), true).ok());
}

// loss = sum(output); one weight per branch, by central differences.
TEST(FfcaTest, BothBranchesReceiveGradient) {
  Rng rng(11);
  Ffca<double> ffca({4, 0.5});
  ffca.Init(rng);
  const auto z = RandomTensor<double>({2, 4, 2, 4, 5}, rng);
  ParamSet<double> params;
  ffca.Collect("ffca", &params);
  params.ZeroGrad();
  const auto y = *ffca.Forward(z, true);
  ffca.Backward(Tensor<double>(y.shape(), 1.0));
  auto Sum = [&] {
    const auto out = *ffca.Forward(z, true);
    double s = 0;
    for (double v : out.values()) s += v;
    return s;
  };
  for (Param<double>* p :
       {&ffca.lfu().conv().weight(), &ffca.gfu().spectral_conv().weight()}) {
    const double h = 1e-6, keep = p->value[1];
    p->value[1] = keep + h;
    const double up = Sum();
    p->value[1] = keep - h;
    const double down = Sum();
    p->value[1] = keep;
    const double fd = (up - down) / (2 * h);
    EXPECT_GT(std::abs(fd), 1e-8);
    EXPECT_NEAR(p->grad[1], fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

}  // namespace
}  // namespace fdin
