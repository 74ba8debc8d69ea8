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

#ifndef FDIN_OPTIMIZER_H_
#define FDIN_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "fdin/layers.h"

namespace fdin {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction; moment buffers follow the ParamSet order.
class Adam {
 public:
  explicit Adam(ParamSet<float>* params, AdamOptions options = {});

  void Step(double learning_rate);
  int64_t steps() const { return step_; }

 private:
  ParamSet<float>* params_;
  AdamOptions options_;
  std::vector<Tensor<float>> m_, v_;
  int64_t step_ = 0;
};

}  // namespace fdin

#endif  // FDIN_OPTIMIZER_H_
