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

// Command-line front end: one experiment per invocation.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fecam/cli/experiments.hpp"
#include "fecam/cli/run_config.hpp"
#include "fecam/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> formats;
  std::vector<std::string> inputs;
  std::string experiment;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--out", o.out, "Output directory (overrides FECAM_OUT_DIR and the config)");
  sub->add_option("--format", o.formats, "csv | json | svg (repeatable)")->take_all();
}

fecam::cli::RunConfig resolve(const Overrides& o, std::optional<fecam::cli::ExperimentKind> kind) {
  using namespace fecam::cli;
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (kind) cfg.experiment = *kind;
  if (o.seed) cfg.seed = *o.seed;
  if (const char* env = std::getenv("FECAM_OUT_DIR"); env && *env) cfg.output_dir = env;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.formats.empty()) {
    cfg.formats.clear();
    for (const auto& f : o.formats) cfg.formats.push_back(format_from_string(f));
  }
  if (!o.inputs.empty()) cfg.report_inputs = o.inputs;
  return cfg;
}

int execute(const fecam::cli::RunConfig& cfg) {
  const auto outcome = fecam::cli::run_experiment(cfg);
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << outcome.summary_line << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fecam::cli;
  CLI::App app{"FeFET CAM behavioural simulator and benchmark driver"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<ExperimentKind> chosen;
  bool run_from_config = false, dump = false;

  for (ExperimentKind k : all_experiments()) {
    auto* sub = app.add_subcommand(to_string(k), fmt::format("Run the {} experiment", to_string(k)));
    add_common(sub, o);
    if (k == ExperimentKind::bench_report)
      sub->add_option("inputs", o.inputs, "summary.json files of earlier runs");
    sub->callback([&chosen, k] { chosen = k; });
  }
  auto* run = app.add_subcommand("run", "Run the experiment named in the config");
  add_common(run, o);
  run->get_option("--config")->required();
  run->callback([&] { run_from_config = true; });

  auto* dump_cmd = app.add_subcommand("dump-config", "Print the effective configuration as JSON");
  add_common(dump_cmd, o);
  dump_cmd->add_option("--experiment", o.experiment, "Experiment whose defaults to resolve");
  dump_cmd->callback([&] { dump = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (dump) {
      std::optional<ExperimentKind> k;
      if (!o.experiment.empty()) k = experiment_from_string(o.experiment);
      std::cout << to_json(resolve(o, k)).dump(2) << '\n';
      return 0;
    }
    return execute(resolve(o, run_from_config ? std::nullopt : chosen));
  } catch (const fecam::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fecam::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
}
