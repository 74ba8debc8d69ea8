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

#include "fdin/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "fdin/absr.h"
#include "fdin/decoder.h"
#include "fdin/encoder.h"
#include "fdin/ffca.h"

namespace fdin {
namespace {

template <typename T>
struct Probe {
  std::function<Tensor<T>()> forward;
  std::function<void(const Tensor<T>&)> backward;
  ParamSet<T> params;
};

template <typename T>
Tensor<T> RandomTensor(const Shape& shape, Rng& rng) {
  Tensor<T> t(shape);
  for (int64_t i = 0; i < t.size(); ++i) t[i] = T(Normal(rng));
  return t;
}

template <typename T>
Tensor<T> Unwrap(absl::StatusOr<Tensor<T>> s) {
  FDIN_CHECK(s.ok());
  return *std::move(s);
}

// Small instance of `module`, its parameters initialized from `rng`.
template <typename T>
Probe<T> MakeProbe(const std::string& module, Rng& rng) {
  Probe<T> p;
  if (module == "absr") {
    auto m = std::make_shared<Absr<T>>(8, 8);
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 3, 2, 8, 8}, rng));
    p.forward = [m, x] { return Unwrap(m->Forward(*x)); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else if (module == "encoder.stem") {
    auto m = std::make_shared<ConvNormRelu<T>>(ConvSpec{3, 4, 3, 1, false});
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 3, 2, 8, 8}, rng));
    p.forward = [m, x] { return m->Forward(*x, true); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else if (module == "encoder.resblock") {
    // Channel change plus stride 2 exercises the projection shortcut too.
    auto m = std::make_shared<ResBlock<T>>(4, 8, 2);
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 4, 2, 8, 8}, rng));
    p.forward = [m, x] { return Unwrap(m->Forward(*x, true)); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else if (module == "ffca.lfu") {
    auto m = std::make_shared<Lfu<T>>(4);
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 4, 2, 8, 8}, rng));
    p.forward = [m, x] { return Unwrap(m->Forward(*x, true)); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else if (module == "ffca.gfu") {
    auto m = std::make_shared<Gfu<T>>(4);
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 4, 2, 8, 8}, rng));
    p.forward = [m, x] { return Unwrap(m->Forward(*x, true)); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else if (module == "ffca.fuse") {
    auto m = std::make_shared<Ffca<T>>(FfcaConfig{8, 0.5});
    m->Init(rng);
    auto x = std::make_shared<Tensor<T>>(RandomTensor<T>({1, 8, 2, 8, 8}, rng));
    p.forward = [m, x] { return Unwrap(m->Forward(*x, true)); };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->fuse().Collect(module, &p.params);
  } else if (module == "decoder") {
    auto m = std::make_shared<Decoder<T>>(std::vector<int>{4, 8});
    m->Init(rng);
    auto pyramid = std::make_shared<FeaturePyramid<T>>();
    pyramid->push_back(RandomTensor<T>({1, 4, 2, 4, 4}, rng));
    pyramid->push_back(RandomTensor<T>({1, 8, 2, 2, 2}, rng));
    p.forward = [m, pyramid] {
      return Unwrap(m->Forward(*pyramid, pyramid->back(), true));
    };
    p.backward = [m](const Tensor<T>& dy) { m->Backward(dy); };
    m->Collect(module, &p.params);
  } else {
    FDIN_CHECK(false && "unknown gradcheck module");
  }
  return p;
}

template <typename T>
double Loss(const Tensor<T>& out, const Tensor<T>& r) {
  double s = 0.0;
  for (int64_t i = 0; i < out.size(); ++i) s += double(out[i]) * double(r[i]);
  return s;
}

// A probe with its fixed projection and analytic gradients computed.
template <typename T>
struct Prepared {
  Probe<T> probe;
  Tensor<T> r;
  double scale = 0.0;  // largest |analytic gradient| in the module
};

template <typename T>
Prepared<T> Prepare(const std::string& module, uint64_t seed) {
  Rng rng(seed);
  Prepared<T> p{MakeProbe<T>(module, rng), {}, 0.0};
  const Tensor<T> out = p.probe.forward();
  p.r = RandomTensor<T>(out.shape(), rng);
  p.probe.params.ZeroGrad();
  p.probe.backward(p.r);
  for (auto& np : p.probe.params.params) {
    for (int64_t i = 0; i < np.param->grad.size(); ++i) {
      p.scale = std::max(p.scale, std::abs(double(np.param->grad[i])));
    }
  }
  return p;
}

template <typename T>
double CentralDifference(Prepared<T>& p, Param<T>& param, int64_t i,
                         double step) {
  const T saved = param.value[i];
  param.value[i] = T(saved + step);
  const double up = Loss(p.probe.forward(), p.r);
  param.value[i] = T(saved - step);
  const double down = Loss(p.probe.forward(), p.r);
  param.value[i] = saved;
  // The step actually representable in T.
  const double h2 = double(T(saved + step)) - double(T(saved - step));
  return (up - down) / h2;
}

double RelError(double analytic, double numeric, double floor) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), floor, 1e-300});
  return std::abs(analytic - numeric) / denom;
}

// Entries of one tensor by decreasing |gradient|.
std::vector<int64_t> ByMagnitude(const Tensor<double>& grad) {
  std::vector<int64_t> idx(grad.size());
  for (int64_t i = 0; i < grad.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int64_t a, int64_t b) {
    return std::abs(grad[a]) > std::abs(grad[b]);
  });
  return idx;
}

constexpr double kStepF64 = 1e-6;
constexpr double kStepF32 = 1e-3;
constexpr int kMaxCandidates = 16;
// A double-precision difference at the float step that strays this far from
// the analytic value means a ReLU kink lies within the step.
constexpr double kKinkTolerance = 1e-4;

// Per tensor, the largest-gradient entry whose +-kStepF32 neighborhood is
// smooth in double precision; -1 where every candidate straddles a kink.
std::vector<int64_t> SmoothPicks(Prepared<double>& pd) {
  std::vector<int64_t> picks;
  for (auto& np : pd.probe.params.params) {
    Param<double>& dp = *np.param;
    const std::vector<int64_t> order = ByMagnitude(dp.grad);
    int64_t pick = -1;
    for (int c = 0; c < std::min<int>(kMaxCandidates, order.size()); ++c) {
      const int64_t i = order[c];
      const double probe = CentralDifference(pd, dp, i, kStepF32);
      if (RelError(dp.grad[i], probe, 1e-2 * pd.scale) < kKinkTolerance) {
        pick = i;
        break;
      }
    }
    picks.push_back(pick);
  }
  return picks;
}

constexpr int kMaxInstances = 8;

GradcheckResult CheckModule(const std::string& module, uint64_t seed,
                            double corrupt_scale) {
  // Finite differences are meaningless across a ReLU kink, so the random
  // instance is redrawn until every tensor has a smooth entry. The choice
  // looks only at double-precision values, never at the float result.
  uint64_t instance_seed = seed;
  std::vector<int64_t> picks;
  for (int attempt = 0; attempt < kMaxInstances; ++attempt) {
    instance_seed = seed + 0x632be59bd9b4e019ULL * attempt;
    Prepared<double> pd = Prepare<double>(module, instance_seed);
    picks = SmoothPicks(pd);
    if (std::find(picks.begin(), picks.end(), -1) == picks.end()) break;
  }

  GradcheckResult result;
  result.module = module;
  Prepared<double> pd = Prepare<double>(module, instance_seed);
  Prepared<float> pf = Prepare<float>(module, instance_seed);
  auto& dparams = pd.probe.params.params;
  auto& fparams = pf.probe.params.params;
  FDIN_CHECK(dparams.size() == fparams.size());
  for (size_t k = 0; k < dparams.size(); ++k) {
    Param<double>& dp = *dparams[k].param;
    Param<float>& fp = *fparams[k].param;
    const int64_t best = ByMagnitude(dp.grad).front();
    const double a64 = dp.grad[best] * corrupt_scale;
    const double n64 = CentralDifference(pd, dp, best, kStepF64);
    result.max_rel_error_f64 =
        std::max(result.max_rel_error_f64, RelError(a64, n64, 1e-2 * pd.scale));

    const int64_t pick = picks[k] >= 0 ? picks[k] : best;
    const double a32 = double(fp.grad[pick]) * corrupt_scale;
    const double n32 = CentralDifference(pf, fp, pick, kStepF32);
    result.max_rel_error_f32 =
        std::max(result.max_rel_error_f32, RelError(a32, n32, 1e-2 * pf.scale));
    ++result.entries;
  }
  result.pass = result.max_rel_error_f32 < kGradcheckTolF32 &&
                result.max_rel_error_f64 < kGradcheckTolF64;
  return result;
}

}  // namespace

std::vector<std::string> GradcheckModules() {
  return {"absr",     "encoder.stem", "encoder.resblock", "ffca.lfu",
          "ffca.gfu", "ffca.fuse",    "decoder"};
}

std::vector<GradcheckResult> RunGradchecks(const GradcheckOptions& options) {
  std::vector<GradcheckResult> results;
  const auto modules = GradcheckModules();
  for (size_t i = 0; i < modules.size(); ++i) {
    const double corrupt = modules[i] == options.corrupt ? 1.5 : 1.0;
    results.push_back(
        CheckModule(modules[i], options.seed * 1000003ULL + i, corrupt));
  }
  return results;
}

}  // namespace fdin
