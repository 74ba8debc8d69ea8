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

#ifndef FDIN_PLOT_H_
#define FDIN_PLOT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "fdin/image_io.h"

namespace fdin {

struct PlotSeries {
  std::string label;
  std::vector<double> values;  // one per category, expected in [0, 1]
};

// Grouped bar chart on a [0, 1] axis with category labels and a legend.
Image8 RenderBarChart(const std::string& title,
                      const std::vector<std::string>& categories,
                      const std::vector<PlotSeries>& series);

absl::Status WriteBarChart(const std::filesystem::path& path,
                           const std::string& title,
                           const std::vector<std::string>& categories,
                           const std::vector<PlotSeries>& series);

}  // namespace fdin

#endif  // FDIN_PLOT_H_
