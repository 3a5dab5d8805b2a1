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

#include "crsopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "crsopt/errors.hpp"
#include "crsopt/seeding.hpp"

namespace crsopt {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

int worker_count() {
  if (const char* env = std::getenv("CRSOPT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void format_double(std::ostream& out, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  out << buffer;
}

}  // namespace

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "genie") return Algorithm::kGenie;
  if (name == "eco") return Algorithm::kEco;
  if (name == "edt") return Algorithm::kEdt;
  if (name == "crs") return Algorithm::kCrs;
  if (name == "decrs") return Algorithm::kDecrs;
  throw DimensionError("unknown algorithm: " + name);
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kGenie: return "genie";
    case Algorithm::kEco: return "eco";
    case Algorithm::kEdt: return "edt";
    case Algorithm::kCrs: return "crs";
    case Algorithm::kDecrs: return "decrs";
  }
  return "unknown";
}

SeriesSpec parse_series(const std::string& series) {
  std::stringstream stream(series);
  std::string token;
  SeriesSpec spec{Algorithm::kGenie};
  bool first = true;
  while (std::getline(stream, token, '-')) {
    if (first) {
      spec.algorithm = algorithm_from_string(token);
      first = false;
    } else if (token == "dep") {
      spec.distance_dependent = true;
    } else if (token == "ma") {
      spec.zero_due_demand = true;
    } else if (token == "re") {
      spec.zero_mue_demand = true;
    } else {
      throw DimensionError("unknown series suffix: " + token);
    }
  }
  if (first) throw DimensionError("empty series id");
  return spec;
}

SystemConfig apply_series(const SystemConfig& base, const SeriesSpec& spec) {
  SystemConfig config = base;
  if (spec.distance_dependent) config.blockage_mode = BlockageMode::kDistanceDependent;
  if (spec.zero_due_demand) config.throughput_due = 0.0;
  if (spec.zero_mue_demand) config.throughput_mue = 0.0;
  return config;
}

TrialResult run_trial(const SystemConfig& config, Algorithm algorithm, std::uint64_t seed,
                      const EfficiencyProfile* profile, TransmitPlan* plan_out,
                      std::vector<ScaTrace>* traces_out) {
  SystemConfig cfg = config;
  // The fairness protocol: the per-block algorithms flush their residual
  // data on an unblocked final block, and every algorithm consumes the
  // identical realization, so the final block is unblocked for all.
  cfg.unblocked_final_block = true;
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  TrialResult result;
  result.seed = seed;
  result.algorithm = algorithm;
  result.mue_delivered.assign(cfg.n_mues, 0.0);

  const ChannelRealization realization = sample_realization(cfg, seed);
  TransmitPlan plan;
  std::vector<ScaTrace> traces;
  double flush_energy = 0.0;

  const auto finish = [&](bool run_verify) {
    if (run_verify) {
      const RateReport report = verify_plan(plan, realization, cfg, cfg.verify_tol);
      result.total_energy = report.total_energy;
      result.mue_delivered = report.mue_delivered;
      result.due_delivered = report.due_delivered;
      result.max_violation = report.max_violation;
      result.feasible = report.feasible;
      result.flush_energy_share =
          report.total_energy > 0.0 ? flush_energy / report.total_energy : 0.0;
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (plan_out) *plan_out = plan;
    if (traces_out) *traces_out = traces;
    return result;
  };

  if (algorithm == Algorithm::kGenie || algorithm == Algorithm::kDecrs) {
    const AlgorithmResult solved = algorithm == Algorithm::kGenie
                                       ? genie_solve(realization, cfg)
                                       : decrs_genie_solve(realization, cfg);
    if (!solved.realization_feasible) {
      result.excluded_reason = solved.failure_reason;
      plan.framework = algorithm == Algorithm::kGenie ? Framework::kIdecrs : Framework::kDecrs;
      plan.blocks.resize(cfg.n_blocks);
      return finish(false);
    }
    plan = solved.plan;
    traces.push_back(solved.trace);
    result.sca_iterations = solved.total_sca_iterations;
    return finish(true);
  }

  // Per-block algorithms: steps over blocks 1..T-1, then the flush.
  EfficiencyProfile local_profile;
  if (algorithm == Algorithm::kEco) {
    if (profile) {
      local_profile = *profile;
    } else {
      local_profile =
          compute_delta(cfg, cfg.delta_calibration_trials, derive_seed(seed, 0xEC0, 0));
    }
    local_profile.s = cfg.eco_s;
  }

  const Framework framework =
      algorithm == Algorithm::kCrs ? Framework::kCrs : Framework::kIdecrs;
  plan.framework = framework;
  plan.channel_scale = realization.channel_scale;
  plan.blocks.resize(cfg.n_blocks);
  ResidualState residuals = ResidualState::initial(cfg);

  try {
    for (int t = 0; t < cfg.n_blocks - 1; ++t) {
      const BlockChannels channels = BlockChannels::from_realization(realization, t);
      BlockStepResult step;
      switch (algorithm) {
        case Algorithm::kEco:
          step = eco_step(channels, residuals, local_profile, cfg.n_blocks - t, cfg);
          break;
        case Algorithm::kEdt:
          step = edt_step(channels, residuals, cfg.n_blocks - t, cfg);
          break;
        case Algorithm::kCrs:
          step = crs_step(channels, residuals, cfg.n_blocks - t, cfg);
          break;
        default:
          break;
      }
      if (step.solved) {
        plan.blocks[t] = std::move(step.plan);
        result.sca_iterations += step.trace.iterations();
        traces.push_back(std::move(step.trace));
      }
    }
    const BlockChannels last = BlockChannels::unblocked(realization, cfg.n_blocks - 1);
    BlockStepResult flush = final_flush(last, residuals, framework, cfg);
    if (flush.solved) {
      flush_energy = block_energy(flush.plan, cfg.block_duration_s);
      plan.blocks[cfg.n_blocks - 1] = std::move(flush.plan);
      result.sca_iterations += flush.trace.iterations();
      traces.push_back(std::move(flush.trace));
    }
  } catch (const EfficiencyInfeasibleError& error) {
    result.excluded_reason = error.what();
    return finish(false);
  } catch (const InfeasibleTargetsError& error) {
    result.excluded_reason = error.what();
    return finish(false);
  }
  return finish(true);
}

void ExperimentPreset::validate() const {
  if (grid.empty()) throw DimensionError("preset grid must be non-empty");
  if (series.empty()) throw DimensionError("preset needs at least one series");
  if (trials < 1) throw DimensionError("preset needs at least one trial");
  for (const std::string& s : series) parse_series(s);
  base.validate();
  for (double v : grid) config_at(v, series.front()).validate();
}

SystemConfig ExperimentPreset::config_at(double grid_value, const std::string& series_id) const {
  SystemConfig config = base;
  switch (sweep) {
    case Sweep::kMues:
    case Sweep::kFramework:  // framework comparisons sweep the mUE count
      config.n_mues = static_cast<int>(grid_value);
      break;
    case Sweep::kEcoS:
      config.eco_s = grid_value;
      break;
    case Sweep::kBlocks:
      config.n_blocks = static_cast<int>(grid_value);
      break;
    case Sweep::kBlockage:
      config.blockage_p = grid_value;
      break;
  }
  return apply_series(config, parse_series(series_id));
}

ExperimentPreset make_preset(const std::string& name, const SystemConfig& base, int trials) {
  ExperimentPreset preset;
  preset.name = name;
  preset.base = base;
  preset.trials = trials;
  if (name == "fig3") {
    preset.sweep = ExperimentPreset::Sweep::kMues;
    preset.grid = {2, 3, 4};
    preset.series = {"genie", "eco", "edt", "crs", "genie-dep", "eco-dep", "edt-dep", "crs-dep"};
  } else if (name == "fig4") {
    preset.sweep = ExperimentPreset::Sweep::kEcoS;
    preset.grid = {0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    preset.series = {"eco"};
  } else if (name == "fig5") {
    preset.sweep = ExperimentPreset::Sweep::kBlocks;
    preset.grid = {6, 10, 14};
    preset.series = {"genie", "eco", "edt", "crs"};
  } else if (name == "fig6") {
    preset.sweep = ExperimentPreset::Sweep::kBlockage;
    preset.grid = {0.1, 0.3, 0.5};
    preset.series = {"genie", "eco", "edt", "crs"};
  } else if (name == "fig7") {
    preset.sweep = ExperimentPreset::Sweep::kFramework;
    preset.grid = {2, 3, 4};
    preset.series = {"genie", "decrs", "genie-ma", "decrs-ma", "genie-re", "decrs-re"};
    preset.base.throughput_mue = 20.0;
    preset.base.throughput_due = 5.0;
  } else if (name == "custom") {
    preset.sweep = ExperimentPreset::Sweep::kMues;
    preset.grid = {static_cast<double>(base.n_mues)};
    preset.series = {"genie", "eco", "edt", "crs", "decrs"};
  } else {
    throw DimensionError("unknown preset: " + name);
  }
  return preset;
}

ResultTable run_preset(const ExperimentPreset& preset, std::uint64_t master_seed,
                       const std::string& out_dir) {
  preset.validate();

  struct Job {
    std::size_t row;
    SystemConfig config;
    Algorithm algorithm;
    std::uint64_t seed;
    const EfficiencyProfile* profile;
  };

  ResultTable table;
  std::vector<Job> jobs;
  // Delta calibration is shared between series whose configs differ only in
  // the hyperparameter s; key the cache on the s-less config.
  std::map<std::string, EfficiencyProfile> delta_cache;

  for (std::size_t gi = 0; gi < preset.grid.size(); ++gi) {
    const double grid_value = preset.grid[gi];
    for (std::size_t si = 0; si < preset.series.size(); ++si) {
      const std::string& series = preset.series[si];
      const SeriesSpec spec = parse_series(series);
      const SystemConfig config = preset.config_at(grid_value, series);

      const EfficiencyProfile* profile = nullptr;
      if (spec.algorithm == Algorithm::kEco) {
        SystemConfig keyed = config;
        keyed.eco_s = 0.0;
        const std::string key = config_to_json(keyed);
        auto it = delta_cache.find(key);
        if (it == delta_cache.end()) {
          const std::uint64_t base = derive_seed(master_seed, 0xCA11B, fnv1a(key));
          EfficiencyProfile computed =
              compute_delta(config, config.delta_calibration_trials, base);
          it = delta_cache.emplace(key, computed).first;
        }
        EfficiencyProfile adjusted = it->second;
        adjusted.s = config.eco_s;
        adjusted.energy_bound = eco_energy_bound(config, adjusted);
        table.profiles[{grid_value, series}] = adjusted;
      }

      for (int trial = 0; trial < preset.trials; ++trial) {
        TrialRow row;
        row.preset = preset.name;
        row.grid_value = grid_value;
        row.series = series;
        row.seed = derive_seed(master_seed, gi, static_cast<std::uint64_t>(trial));
        table.rows.push_back(row);
        jobs.push_back(Job{table.rows.size() - 1, config, spec.algorithm, row.seed, nullptr});
      }
    }
  }
  // Resolve profile pointers after the map is stable.
  for (Job& job : jobs) {
    const TrialRow& row = table.rows[job.row];
    const auto it = table.profiles.find({row.grid_value, row.series});
    if (it != table.profiles.end()) job.profile = &it->second;
  }

  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
  auto work = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= jobs.size()) return;
      const Job& job = jobs[index];
      const TrialResult trial = run_trial(job.config, job.algorithm, job.seed, job.profile);
      TrialRow& row = table.rows[job.row];
      row.energy = trial.total_energy;
      row.feasible = trial.feasible;
      row.flush_share = trial.flush_energy_share;
      row.sca_iterations = trial.sca_iterations;
      row.wall_time_s = trial.wall_time_s;
      row.excluded_reason = trial.excluded_reason;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream raw(out_dir + "/raw.csv");
    write_raw_csv(preset, table, raw);
    std::ofstream agg(out_dir + "/agg.csv");
    write_agg_csv(preset, table, agg);
  }
  return table;
}

namespace {

std::string sweep_label(ExperimentPreset::Sweep sweep) {
  switch (sweep) {
    case ExperimentPreset::Sweep::kMues: return "n_mues";
    case ExperimentPreset::Sweep::kEcoS: return "s";
    case ExperimentPreset::Sweep::kBlocks: return "n_blocks";
    case ExperimentPreset::Sweep::kBlockage: return "p";
    case ExperimentPreset::Sweep::kFramework: return "n_mues";
  }
  return "x";
}

struct Aggregate {
  int trials = 0;
  int feasible = 0;
  int excluded = 0;
  double energy_sum = 0.0;
  double flush_sum = 0.0;
};

std::map<std::pair<double, std::string>, Aggregate> aggregate_rows(const ResultTable& table) {
  std::map<std::pair<double, std::string>, Aggregate> out;
  for (const TrialRow& row : table.rows) {
    Aggregate& agg = out[{row.grid_value, row.series}];
    ++agg.trials;
    if (!row.excluded_reason.empty()) {
      ++agg.excluded;
    } else if (row.feasible) {
      ++agg.feasible;
      agg.energy_sum += row.energy;
      agg.flush_sum += row.flush_share;
    }
  }
  return out;
}

}  // namespace

void write_raw_csv(const ExperimentPreset& preset, const ResultTable& table, std::ostream& out) {
  // Wall time stays out of the files so that (preset, master seed) fully
  // determines every emitted byte.
  out << sweep_label(preset.sweep)
      << ",algorithm,seed,energy_j,feasible,flush_share,sca_iterations,excluded\n";
  for (const TrialRow& row : table.rows) {
    format_double(out, row.grid_value);
    out << "," << row.series << "," << row.seed << ",";
    format_double(out, row.energy);
    out << "," << (row.feasible ? 1 : 0) << ",";
    format_double(out, row.flush_share);
    out << "," << row.sca_iterations << "," << row.excluded_reason << "\n";
  }
}

void write_agg_csv(const ExperimentPreset& preset, const ResultTable& table, std::ostream& out) {
  const auto aggregates = aggregate_rows(table);
  out << sweep_label(preset.sweep)
      << ",algorithm,trials,feasible,excluded,mean_energy_j,mean_flush_share,eco_bound_j\n";
  for (const auto& [key, agg] : aggregates) {
    format_double(out, key.first);
    out << "," << key.second << "," << agg.trials << "," << agg.feasible << "," << agg.excluded
        << ",";
    format_double(out, agg.feasible > 0 ? agg.energy_sum / agg.feasible : 0.0);
    out << ",";
    format_double(out, agg.feasible > 0 ? agg.flush_sum / agg.feasible : 0.0);
    out << ",";
    const auto profile = table.profiles.find(key);
    if (profile != table.profiles.end()) format_double(out, profile->second.energy_bound);
    out << "\n";
  }
}

void emit_plot_data(const ExperimentPreset& preset, const ResultTable& table,
                    const std::string& figure_id, const std::string& out_dir) {
  const bool known = figure_id == "fig3" || figure_id == "fig4a" || figure_id == "fig4b" ||
                     figure_id == "fig5" || figure_id == "fig6" || figure_id == "fig7";
  if (!known) throw DimensionError("unknown figure id: " + figure_id);
  std::filesystem::create_directories(out_dir);
  const auto aggregates = aggregate_rows(table);

  if (figure_id == "fig4a") {
    // One CDF series per s value.
    for (double s : preset.grid) {
      std::vector<double> samples;
      for (const TrialRow& row : table.rows)
        if (row.grid_value == s && row.feasible && row.excluded_reason.empty())
          samples.push_back(row.energy);
      std::sort(samples.begin(), samples.end());
      std::ostringstream name;
      name << out_dir << "/fig4a_cdf_s" << s << ".csv";
      std::ofstream out(name.str());
      out << "energy_j,cdf\n";
      for (std::size_t i = 0; i < samples.size(); ++i) {
        format_double(out, samples[i]);
        out << ",";
        format_double(out, static_cast<double>(i + 1) / samples.size());
        out << "\n";
      }
    }
    return;
  }

  if (figure_id == "fig4b") {
    std::ofstream out(out_dir + "/fig4b_eco.csv");
    out << "s,mean_energy_j,eco_up_bound_j\n";
    for (double s : preset.grid) {
      const auto it = aggregates.find({s, "eco"});
      if (it == aggregates.end()) continue;
      format_double(out, s);
      out << ",";
      format_double(out, it->second.feasible > 0 ? it->second.energy_sum / it->second.feasible
                                                 : 0.0);
      out << ",";
      const auto profile = table.profiles.find({s, "eco"});
      if (profile != table.profiles.end()) format_double(out, profile->second.energy_bound);
      out << "\n";
    }
    return;
  }

  // Mean-energy curves: one file per series.
  for (const std::string& series : preset.series) {
    std::ofstream out(out_dir + "/" + figure_id + "_" + series + ".csv");
    out << sweep_label(preset.sweep) << ",mean_energy_j,feasible,trials\n";
    for (double v : preset.grid) {
      const auto it = aggregates.find({v, series});
      if (it == aggregates.end()) continue;
      format_double(out, v);
      out << ",";
      format_double(out, it->second.feasible > 0 ? it->second.energy_sum / it->second.feasible
                                                 : 0.0);
      out << "," << it->second.feasible << "," << it->second.trials << "\n";
    }
  }
}

std::map<std::string, double> paired_mean_energies(const ResultTable& table, double grid_value,
                                                   const std::vector<std::string>& series) {
  // Group rows by seed; keep seeds where every requested series is feasible.
  std::map<std::uint64_t, std::map<std::string, double>> by_seed;
  for (const TrialRow& row : table.rows)
    if (row.grid_value == grid_value && row.feasible && row.excluded_reason.empty())
      by_seed[row.seed][row.series] = row.energy;

  std::map<std::string, double> sums;
  int count = 0;
  for (const auto& [seed, energies] : by_seed) {
    bool complete = true;
    for (const std::string& s : series) complete &= energies.count(s) > 0;
    if (!complete) continue;
    ++count;
    for (const std::string& s : series) sums[s] += energies.at(s);
  }
  for (auto& [s, value] : sums) value /= std::max(1, count);
  return sums;
}

}  // namespace crsopt
