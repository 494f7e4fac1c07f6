/*
 * Copyright 2026 The fecam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fecam::cli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  ///< scatter instead of a polyline
  std::string color = "#1f77b4";
  bool show_in_legend = true;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

/// Self-contained SVG line/scatter chart. Output depends only on the input.
std::string render_svg(const PlotSpec& plot);

}  // namespace fecam::cli
