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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "fecam/cli/run_config.hpp"

namespace fecam::cli {

struct RunOutcome {
  std::string summary_line;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

/// Runs cfg.experiment and writes its artifacts under
/// cfg.output_dir / <experiment name>. Identical configs give identical bytes.
RunOutcome run_experiment(const RunConfig& cfg);

/// Writes `content` to a sibling temporary file, then renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Aggregates summary.json files from earlier runs. Unreadable inputs become
/// warnings; they never abort the report.
nlohmann::json bench_report(const std::vector<std::string>& inputs, std::vector<std::string>& warnings);

}  // namespace fecam::cli
