// Copyright 2026 the crsopt authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "crsopt/harness.hpp"

namespace {

crsopt::SystemConfig desk_config() {
  crsopt::SystemConfig config;
  config.n_antennas = 8;
  config.n_vertical = 2;
  config.n_horizontal = 4;
  config.n_mues = 2;
  config.n_blocks = 10;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal transmit planning for two-phase cooperative rate-splitting"};
  app.require_subcommand(1);

  // run: Monte Carlo presets
  auto* run = app.add_subcommand("run", "Run an experiment preset and write CSV outputs");
  std::string preset_name = "custom";
  std::string scenario_path;
  std::string out_dir = "out";
  std::string algo = "all";
  int trials = 30;
  std::uint64_t seed = 1;
  run->add_option("--preset", preset_name, "fig3|fig4|fig5|fig6|fig7|custom")
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7", "custom"}));
  run->add_option("--scenario", scenario_path, "Scenario JSON file (desk-scale default)");
  run->add_option("--trials", trials, "Trials per grid point")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Master seed (also overrides the scenario seed)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--algo", algo, "genie|eco|edt|crs|decrs|all");

  // verify: replay a serialized plan against a seeded realization
  auto* verify = app.add_subcommand("verify", "Verify a serialized transmit plan");
  std::string plan_path;
  std::string verify_scenario;
  std::uint64_t verify_seed = 1;
  double tol = 1e-5;
  verify->add_option("--plan", plan_path, "Plan JSON file")->required();
  verify->add_option("--scenario", verify_scenario, "Scenario JSON file");
  verify->add_option("--seed", verify_seed, "Realization seed");
  verify->add_option("--tol", tol, "Feasibility tolerance");

  // scenario: write the default desk-scale scenario file
  auto* scenario = app.add_subcommand("scenario", "Write a scenario file to edit");
  std::string scenario_out = "scenario.json";
  bool paper_scale = false;
  scenario->add_option("--out", scenario_out, "Output path");
  scenario->add_flag("--paper-scale", paper_scale, "Full-scale settings (slow)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      crsopt::SystemConfig base =
          scenario_path.empty() ? desk_config() : crsopt::load_config(scenario_path);
      base.seed = seed;
      crsopt::ExperimentPreset preset = crsopt::make_preset(preset_name, base, trials);
      if (algo != "all") {
        const crsopt::Algorithm wanted = crsopt::algorithm_from_string(algo);
        std::vector<std::string> kept;
        for (const std::string& s : preset.series)
          if (crsopt::parse_series(s).algorithm == wanted) kept.push_back(s);
        if (kept.empty()) {
          std::cerr << "no series of preset " << preset_name << " uses algorithm " << algo
                    << "\n";
          return 2;
        }
        preset.series = kept;
      }
      const crsopt::ResultTable table = crsopt::run_preset(preset, seed, out_dir);
      if (preset_name == "fig4") {
        crsopt::emit_plot_data(preset, table, "fig4a", out_dir);
        crsopt::emit_plot_data(preset, table, "fig4b", out_dir);
      } else if (preset_name != "custom") {
        crsopt::emit_plot_data(preset, table, preset_name, out_dir);
      }
      int feasible = 0, excluded = 0;
      for (const auto& row : table.rows) {
        feasible += row.feasible;
        excluded += !row.excluded_reason.empty();
      }
      std::cout << "wrote " << out_dir << "/raw.csv (" << table.rows.size() << " rows, "
                << feasible << " feasible, " << excluded << " excluded)\n";
      return 0;
    }

    if (verify->parsed()) {
      crsopt::SystemConfig config =
          verify_scenario.empty() ? desk_config() : crsopt::load_config(verify_scenario);
      config.unblocked_final_block = true;
      const crsopt::TransmitPlan plan = crsopt::load_plan(plan_path);
      const crsopt::ChannelRealization realization =
          crsopt::sample_realization(config, verify_seed);
      const crsopt::RateReport report = crsopt::verify_plan(plan, realization, config, tol);
      std::cout << "feasible: " << (report.feasible ? "yes" : "no")
                << "\nmax_violation: " << report.max_violation << " (" << report.worst_constraint
                << ")\ntotal_energy_j: " << report.total_energy << "\n";
      return report.feasible ? 0 : 1;
    }

    if (scenario->parsed()) {
      crsopt::SystemConfig config = desk_config();
      if (paper_scale) {
        config = crsopt::SystemConfig{};  // paper-scale defaults
      }
      crsopt::save_config(config, scenario_out);
      std::cout << "wrote " << scenario_out << "\n";
      return 0;
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
  return 0;
}
