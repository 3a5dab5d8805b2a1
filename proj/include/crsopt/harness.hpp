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

#ifndef CRSOPT_HARNESS_HPP
#define CRSOPT_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crsopt/algorithms.hpp"

namespace crsopt {

enum class Algorithm { kGenie, kEco, kEdt, kCrs, kDecrs };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algorithm);

struct TrialResult {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kGenie;
  double total_energy = 0.0;  // joules
  std::vector<double> mue_delivered;
  double due_delivered = 0.0;
  bool feasible = false;
  double flush_energy_share = 0.0;
  int sca_iterations = 0;
  double wall_time_s = 0.0;
  double max_violation = 0.0;
  std::string excluded_reason;  // nonempty when the realization was unservable
};

// Samples one realization, runs the algorithm (per-block ones end with the
// residual flush), verifies the result, and records metrics. An ECO run
// without a precomputed profile calibrates delta itself from seeds derived
// from `seed`.
TrialResult run_trial(const SystemConfig& config, Algorithm algorithm, std::uint64_t seed,
                      const EfficiencyProfile* profile = nullptr,
                      TransmitPlan* plan_out = nullptr,
                      std::vector<ScaTrace>* traces_out = nullptr);

// A series is an algorithm id plus optional variant suffixes:
//   "-dep"  distance-dependent blockage
//   "-ma"   multiple-access scenario (D_d = 0)
//   "-re"   relaying scenario (D_k = 0)
// e.g. "edt-dep", "genie-ma", "decrs-re".
struct SeriesSpec {
  Algorithm algorithm;
  bool distance_dependent = false;
  bool zero_due_demand = false;
  bool zero_mue_demand = false;
};
SeriesSpec parse_series(const std::string& series);
SystemConfig apply_series(const SystemConfig& base, const SeriesSpec& spec);

struct ExperimentPreset {
  enum class Sweep { kMues, kEcoS, kBlocks, kBlockage, kFramework };

  std::string name;
  Sweep sweep = Sweep::kMues;
  std::vector<double> grid;
  SystemConfig base;
  int trials = 30;
  std::vector<std::string> series;

  void validate() const;  // throws DimensionError
  SystemConfig config_at(double grid_value, const std::string& series) const;
};

// Desk-scale presets named after the experiment they reproduce
// (fig3..fig7). `custom` starts from the base config with an empty sweep.
ExperimentPreset make_preset(const std::string& name, const SystemConfig& base, int trials);

struct TrialRow {
  std::string preset;
  double grid_value = 0.0;
  std::string series;
  std::uint64_t seed = 0;
  double energy = 0.0;
  bool feasible = false;
  double flush_share = 0.0;
  int sca_iterations = 0;
  double wall_time_s = 0.0;
  std::string excluded_reason;
};

struct ResultTable {
  std::vector<TrialRow> rows;
  // delta profiles per (grid value, series) for ECO series, used by the
  // aggregate table's bound column.
  std::map<std::pair<double, std::string>, EfficiencyProfile> profiles;
};

// Runs every (grid value, series, trial) cell. Trials may execute in a
// work pool (size from CRSOPT_THREADS, default hardware concurrency); row
// order is fixed by (grid index, series index, trial index) regardless of
// completion order. When out_dir is nonempty writes raw.csv and agg.csv.
ResultTable run_preset(const ExperimentPreset& preset, std::uint64_t master_seed,
                       const std::string& out_dir = "");

void write_raw_csv(const ExperimentPreset& preset, const ResultTable& table, std::ostream& out);
void write_agg_csv(const ExperimentPreset& preset, const ResultTable& table, std::ostream& out);

// One file per curve (x, mean energy; CDFs get the sorted sample grid).
// Throws DimensionError for an unknown figure id.
void emit_plot_data(const ExperimentPreset& preset, const ResultTable& table,
                    const std::string& figure_id, const std::string& out_dir);

// Mean energy per series over trials where every listed series is feasible
// (paired comparison); returns series -> mean.
std::map<std::string, double> paired_mean_energies(const ResultTable& table, double grid_value,
                                                   const std::vector<std::string>& series);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

}  // namespace crsopt

#endif  // CRSOPT_HARNESS_HPP
