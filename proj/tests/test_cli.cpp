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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fecam/cam_core.hpp"
#include "fecam/cli/experiments.hpp"
#include "fecam/cli/run_config.hpp"
#include "fecam/cli/svg.hpp"
#include "fecam/errors.hpp"
#include "fecam/hdc_genome.hpp"

using namespace fecam;
using namespace fecam::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("fecam-cli-" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string config_error(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

RunConfig quick(ExperimentKind k, const fs::path& out) {
  RunConfig c;
  c.experiment = k;
  c.output_dir = out.string();
  c.trials = 50;
  c.device_iv.devices = 4;
  c.hdc.synthetic_length = 2000;
  c.hdc.synthetic_queries = 10;
  c.hdc.dimension = 256;
  return c;
}

}  // namespace

TEST_CASE("unknown config keys are rejected with their full path") {
  CHECK(config_error({{"montecarlo", {{"trails", 5}}}}).find("montecarlo.trails") != std::string::npos);
  CHECK(config_error({{"device", {{"sigma", 0.1}}}}).find("device.sigma") != std::string::npos);
  CHECK(config_error({{"colour", "red"}}).find("colour") != std::string::npos);
  CHECK(config_error({{"montecarlo", {{"trials", "many"}}}}).find("montecarlo.trials") != std::string::npos);
  CHECK(config_error({{"experiment", "plot-everything"}}).find("experiment") != std::string::npos);
  CHECK(config_error({{"formats", {"csv", "pdf"}}}).find("pdf") != std::string::npos);
  CHECK_NOTHROW(parse_config(json::object()));
}

TEST_CASE("dumped defaults equal module defaults") {
  const json j = to_json(RunConfig{});
  const DeviceParams dp = DeviceParams::binary_defaults();
  const CellConfig cell;
  const mc::McExperimentConfig mc;
  const AdcConfig adc;
  const hdc::IndexOptions idx;

  CHECK(j["device"]["vth_levels"].get<std::vector<double>>() == dp.vth_levels);
  CHECK(j["device"]["ss_mv_per_dec"] == dp.ss_mv_per_dec);
  CHECK(j["device"]["i0"] == dp.i0);
  CHECK(j["device"]["k_on"] == dp.k_on);
  CHECK(j["device"]["sigma_vth"] == dp.sigma_vth);
  CHECK(j["device"]["vd_char"] == dp.vd_char);
  CHECK(j["cell"]["rs"] == cell.rs);
  CHECK(j["cell"]["vd"] == cell.vd);
  CHECK(j["cell"]["limiter_enabled"] == cell.limiter_enabled);
  CHECK(j["ladder"]["m_guard"] == default_guard(dp));
  CHECK(j["array"]["wordlength"] == mc.wordlength);
  CHECK(j["montecarlo"]["trials"] == mc.trials);
  CHECK(j["montecarlo"]["scenario"] == mc::to_string(mc.scenario));
  CHECK(j["montecarlo"]["margin_fraction"] == mc.margin_fraction);
  CHECK(j["montecarlo"]["threads"] == mc.threads);
  CHECK(j["seed"] == mc.seed);
  CHECK(j["sensing"]["t_stage"] == adc.t_stage);
  CHECK(j["sensing"]["e_stage"] == adc.e_stage);
  CHECK(j["hdc"]["item_seed"] == idx.item_seed);
  CHECK(j["hdc"]["sigma_vth"] == idx.params.sigma_vth);

  RunConfig m;
  m.experiment = ExperimentKind::mcam_worst;
  CHECK(to_json(m)["device"]["vth_levels"].get<std::vector<double>>() ==
        DeviceParams::multilevel_defaults().vth_levels);
}

TEST_CASE("effective config survives a round trip") {
  RunConfig c;
  c.seed = 99;
  c.wordlength = 16;
  c.device.sigma_vth = 0.02;
  c.hdc.threshold = 12;
  c.formats = {OutputFormat::svg};
  const json once = to_json(c);
  CHECK(to_json(parse_config(once)) == once);
}

TEST_CASE("bcam-sweep at sigma = 0 writes the ideal staircase") {
  TempDir tmp("staircase");
  RunConfig c = quick(ExperimentKind::bcam_sweep, tmp.path);
  c.device.sigma_vth = 0.0;
  const auto out = run_experiment(c);
  const auto rows = read_csv(out.directory / "staircase.csv");
  REQUIRE(rows.size() == 10);

  const DeviceParams p = c.effective_device();
  const auto ladder = make_ladder(p, c.effective_guard());
  const double on = cell_current_at(ladder.vsl2(), p.vth_levels[0], c.cell, p);
  const double off = cell_current_at(ladder.vsl1(), p.vth_levels[0], c.cell, p);
  for (std::size_t k = 0; k <= 8; ++k) {
    const auto& r = rows[k + 1];
    CHECK(std::stoul(r[1]) == k);
    const double ideal = static_cast<double>(k) * on + static_cast<double>(8 - k) * off;
    CHECK(std::stod(r[2]) == doctest::Approx(ideal).epsilon(1e-6));
    CHECK(std::stod(r[2]) == doctest::Approx(static_cast<double>(k) * c.cell.clamp_current() + 1e-30).epsilon(0.01));
    CHECK(std::stod(r[3]) <= 1e-9 * c.cell.clamp_current());  // rounding only
    CHECK(std::stod(r[6]) == 0.0);
  }
}

TEST_CASE("identical configs give byte-identical artifacts") {
  TempDir a("det-a"), b("det-b");
  for (ExperimentKind k : {ExperimentKind::bcam_sweep, ExperimentKind::mcam_worst, ExperimentKind::device_iv,
                           ExperimentKind::genome_query}) {
    RunConfig ca = quick(k, a.path), cb = quick(k, b.path);
    ca.formats = cb.formats = {OutputFormat::csv, OutputFormat::json, OutputFormat::svg};
    const auto ra = run_experiment(ca);
    const auto rb = run_experiment(cb);
    REQUIRE(ra.written.size() == rb.written.size());
    for (std::size_t i = 0; i < ra.written.size(); ++i) {
      CHECK(ra.written[i].filename() == rb.written[i].filename());
      CHECK(slurp(ra.written[i]) == slurp(rb.written[i]));
    }
    CHECK(ra.summary_line == rb.summary_line);
  }
}

TEST_CASE("device-iv with defaults covers 60 devices with two reads per state") {
  TempDir tmp("iv");
  RunConfig c;
  c.experiment = ExperimentKind::device_iv;
  c.output_dir = tmp.path.string();
  const auto out = run_experiment(c);
  const auto reads = read_csv(out.directory / "reads.csv");
  CHECK(reads.size() == 1 + 60 * 2 * 2);
  const auto curves = read_csv(out.directory / "iv.csv");
  CHECK(curves.size() == 1 + 60 * 2 * 301);
  const json s = json::parse(slurp(out.directory / "summary.json"));
  for (const auto& r : s["results"]["reads"]) CHECK(r["cv_suppression"].get<double>() > 10.0);
}

TEST_CASE("only requested formats are written, atomically") {
  TempDir tmp("formats");
  RunConfig c = quick(ExperimentKind::adc_sweep, tmp.path);
  c.formats = {OutputFormat::json};
  const auto out = run_experiment(c);
  REQUIRE(out.written.size() == 1);
  CHECK(out.written[0].filename() == "summary.json");
  for (const auto& e : fs::directory_iterator(out.directory)) CHECK(e.path().extension() != ".tmp");

  c.formats = {OutputFormat::svg};
  const auto svg = run_experiment(c);
  CHECK(svg.written.size() == 2);
}

TEST_CASE("adc-sweep cost is exactly linear in the threshold") {
  TempDir tmp("adc");
  const auto out = run_experiment(quick(ExperimentKind::adc_sweep, tmp.path));
  const json s = json::parse(slurp(out.directory / "summary.json"));
  CHECK(s["results"]["latency_fit"]["r2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s["results"]["energy_fit"]["r2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s["results"]["latency_fit"]["slope"].get<double>() == doctest::Approx(AdcConfig{}.t_stage));
}

TEST_CASE("bench report") {
  TempDir tmp("report");
  std::vector<std::string> warnings;

  SUBCASE("empty input list is an empty report") {
    const json r = bench_report({}, warnings);
    CHECK(r["runs"].empty());
    CHECK(warnings.empty());
    CHECK(r["label"] == "model-derived, not paper-validated");
  }

  SUBCASE("missing inputs become warnings") {
    const json r = bench_report({(tmp.path / "nope.json").string()}, warnings);
    CHECK(r["runs"].empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("nope.json") != std::string::npos);
  }

  SUBCASE("sense latency scales with the wordlength") {
    RunConfig c32 = quick(ExperimentKind::bcam_sweep, tmp.path / "w32");
    RunConfig c64 = quick(ExperimentKind::bcam_sweep, tmp.path / "w64");
    c32.wordlength = 32;
    c64.wordlength = 64;
    c32.trials = c64.trials = 5;
    const auto a = run_experiment(c32), b = run_experiment(c64);
    const json r = bench_report({(a.directory / "summary.json").string(), (b.directory / "summary.json").string()},
                                warnings);
    REQUIRE(r["runs"].size() == 2);
    CHECK(r["runs"][1]["sense_latency_s"].get<double>() / r["runs"][0]["sense_latency_s"].get<double>() ==
          doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("full default pipeline has every mandatory metric") {
    std::vector<std::string> inputs;
    for (ExperimentKind k : all_experiments()) {
      if (k == ExperimentKind::bench_report) continue;
      inputs.push_back((run_experiment(quick(k, tmp.path)).directory / "summary.json").string());
    }
    RunConfig rc = quick(ExperimentKind::bench_report, tmp.path);
    rc.report_inputs = inputs;
    const auto out = run_experiment(rc);
    CHECK(out.warnings.empty());
    const json r = json::parse(slurp(out.directory / "summary.json"))["results"];
    REQUIRE(r["runs"].size() == inputs.size());
    for (const auto& e : r["runs"]) {
      for (const char* key : {"source", "experiment", "wordlength", "sense_latency_s", "sense_energy_j"})
        CHECK_MESSAGE(e.contains(key), key);
      const std::string kind = e["experiment"];
      if (kind == "bcam-sweep" || kind == "mcam-worst") {
        for (const char* key : {"error_rate", "step1_margin_ion", "step2_margin_ion"}) CHECK(e.contains(key));
      }
      if (kind == "limiter-ablation") {
        CHECK(e["with_limiter"].contains("step2_overlap"));
        CHECK(e["without_limiter"].contains("step2_overlap"));
      }
      if (kind == "genome-query") {
        CHECK(e["query_latency_s"].get<double>() > 0.0);
        CHECK(e["query_energy_j"].get<double>() > 0.0);
        CHECK(e["wordlength"] == hdc::kSegmentWidth);
      }
    }
    CHECK(fs::exists(out.directory / "report.csv"));
  }
}

TEST_CASE("genome-query on a synthetic reference agrees with the oracle") {
  TempDir tmp("genome");
  const auto out = run_experiment(quick(ExperimentKind::genome_query, tmp.path));
  const json r = json::parse(slurp(out.directory / "summary.json"))["results"];
  CHECK(r["oracle_agreement"] == 1.0);
  CHECK(r["planted"]["found"] == r["planted"]["queries"]);
  CHECK(r["absent"]["empty"] == r["absent"]["queries"]);
}

TEST_CASE("genome inputs come from files when configured") {
  TempDir tmp("files");
  const std::string ref = hdc::random_sequence(500, 3);
  {
    std::ofstream fa(tmp.path / "ref.fa");
    fa << ">chr\n" << ref.substr(0, 250) << "\n" << ref.substr(250) << "\n";
    std::ofstream q(tmp.path / "q.txt");
    q << "# planted\n" << ref.substr(40, 16) << "\n\n" << ref.substr(300, 16) << "\n";
  }
  RunConfig c = quick(ExperimentKind::genome_query, tmp.path);
  c.hdc.reference_fasta = (tmp.path / "ref.fa").string();
  c.hdc.queries_file = (tmp.path / "q.txt").string();
  c.hdc.threshold = 0;
  const auto out = run_experiment(c);
  const auto hits = read_csv(out.directory / "hits.csv");
  REQUIRE(hits.size() >= 3);
  CHECK(hits[1] == std::vector<std::string>{"0", "40", "0"});

  c.hdc.reference_fasta = (tmp.path / "missing.fa").string();
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("svg output is self-contained and escapes text") {
  PlotSpec p{"a < b & c", "x", "y", true, {{"s", {{0, 1e-9}, {1, 1e-6}, {2, 0.0}}, false, "#000", true}}};
  const std::string svg = render_svg(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(render_svg(p) == svg);
}
