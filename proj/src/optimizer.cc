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

#include "fdin/optimizer.h"

#include <cmath>

namespace fdin {

Adam::Adam(ParamSet<float>* params, AdamOptions options)
    : params_(params), options_(options) {
  for (const auto& p : params_->params) {
    m_.emplace_back(p.param->value.shape());
    v_.emplace_back(p.param->value.shape());
  }
}

void Adam::Step(double learning_rate) {
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, double(step_));
  const double c2 = 1.0 - std::pow(b2, double(step_));
  for (size_t i = 0; i < params_->params.size(); ++i) {
    Param<float>& p = *params_->params[i].param;
    float* w = p.value.data();
    const float* g = p.grad.data();
    float* m = m_[i].data();
    float* v = v_[i].data();
    for (int64_t j = 0; j < p.value.size(); ++j) {
      m[j] = float(b1 * m[j] + (1.0 - b1) * g[j]);
      v[j] = float(b2 * v[j] + (1.0 - b2) * double(g[j]) * g[j]);
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] -=
          float(learning_rate * mhat / (std::sqrt(vhat) + options_.epsilon));
    }
  }
}

}  // namespace fdin
