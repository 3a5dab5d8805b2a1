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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crsopt/algorithms.hpp"
#include "crsopt/errors.hpp"
#include "crsopt/seeding.hpp"
#include "surrogate.hpp"

namespace crsopt {

namespace {

constexpr double kResidualTol = 1e-9;
// Fraction of the efficiency floor used as the ECO power tie-break; it
// steers the solver to the cheapest point of the optimal rate face while
// staying below 1% of the rate objective.
constexpr double kEcoTieBreak = 0.01;

conic::SolveOptions solver_options(const SystemConfig& config) {
  return {config.solver_accuracy, config.solver_max_iter, false};
}

double total_demand(const SystemConfig& config) {
  return config.n_mues * config.throughput_mue + config.throughput_due;
}

// Delivered rates of a solved block against its channels.
void delivered_rates(const BlockPlan& block, const BlockChannels& channels,
                     Framework framework, std::vector<double>* mue, double* due) {
  for (std::size_t i = 0; i < block.active.size(); ++i)
    (*mue)[block.active[i]] += block.alpha_c[i] + block.alpha_p[i];
  if (framework == Framework::kCrs) {
    *due += block.crs_due_content;
    return;
  }
  const int r = static_cast<int>(block.relaying.size());
  std::vector<double> beta_sums(r), relay_rates(r);
  for (int j = 0; j < r; ++j) {
    beta_sums[j] = block.beta_c[j] + (framework == Framework::kDecrs ? 0.0 : block.beta_p[j]);
    relay_rates[j] = relay_rate(channels.g, block.relay, j);
  }
  if (r > 0) *due += due_block_rate(beta_sums, relay_rates);
}

// --- joint (genie-style) energy minimization over all blocks -------------

AlgorithmResult joint_energy_solve(const ChannelRealization& channels,
                                   const SystemConfig& config, Framework framework) {
  const int t_blocks = channels.n_blocks();
  AlgorithmResult result;
  result.plan.framework = framework;
  result.plan.channel_scale = channels.channel_scale;
  result.plan.blocks.resize(t_blocks);

  if (total_demand(config) <= 0.0) return result;  // zero plan

  std::string reason;
  const auto targets = initial_rate_split(channels, config, &reason);
  if (!targets) {
    result.realization_feasible = false;
    result.failure_reason = reason;
    return result;
  }

  const bool with_due = config.throughput_due > 0.0;
  std::vector<int> modeled;
  std::vector<BlockChannels> block_channels;
  LocalPoint point;
  try {
    for (int t = 0; t < t_blocks; ++t) {
      if (channels.k_t[t] == 0) continue;
      BlockChannels ch = BlockChannels::from_realization(channels, t);
      std::vector<double> mue_targets(ch.k_t());
      std::vector<double> due_shares(ch.k_full());
      for (int i = 0; i < ch.k_t(); ++i) mue_targets[i] = targets->mue_target[t][ch.active[i]];
      for (int j = 0; j < ch.k_full(); ++j) due_shares[j] = targets->due_share[t][ch.relaying[j]];
      BlockInit init = make_block_init(ch, mue_targets, due_shares, framework);
      point.blocks.push_back(init.point);
      modeled.push_back(t);
      block_channels.push_back(std::move(ch));
    }
  } catch (const InfeasibleTargetsError& error) {
    result.realization_feasible = false;
    result.failure_reason = error.what();
    return result;
  }

  TransmitPlan best = result.plan;
  const auto step = [&](const LocalPoint& local, int) -> ScaStep {
    conic::ConicProgram program;
    std::vector<detail::BlockHandles> handles;
    for (std::size_t b = 0; b < modeled.size(); ++b) {
      handles.push_back(detail::build_block(program, block_channels[b], local.blocks[b],
                                            {framework, with_due},
                                            "t" + std::to_string(modeled[b])));
    }
    if (config.throughput_mue > 0.0) {
      for (int k = 0; k < channels.n_mues(); ++k) {
        conic::LinExpr delivered;
        for (std::size_t b = 0; b < modeled.size(); ++b) {
          for (std::size_t i = 0; i < block_channels[b].active.size(); ++i)
            if (block_channels[b].active[i] == k) delivered += handles[b].mue_rate[i];
        }
        program.add_nonneg(delivered - conic::LinExpr(config.throughput_mue));
      }
    }
    if (with_due) {
      conic::LinExpr delivered;
      for (const auto& h : handles)
        if (h.has_due) delivered += h.due_rate;
      program.add_nonneg(delivered - conic::LinExpr(config.throughput_due));
    }
    conic::LinExpr objective;
    for (const auto& h : handles) objective += h.power_w;
    program.set_objective(objective);

    const conic::SolveOutcome outcome = program.solve(solver_options(config));
    ScaStep step_result;
    step_result.status = outcome.status;
    step_result.max_residual = outcome.max_residual;
    if (outcome.status != conic::SolveStatus::kOptimal) return step_result;

    TransmitPlan plan = result.plan;
    LocalPoint next;
    double power = 0.0;
    for (std::size_t b = 0; b < modeled.size(); ++b) {
      BlockPlan block = detail::extract_block(handles[b].vars, block_channels[b],
                                              outcome.primal, framework);
      next.blocks.push_back(detail::refresh_local(block, block_channels[b], framework));
      power += detail::block_power_w(block);
      plan.blocks[modeled[b]] = std::move(block);
    }
    best = std::move(plan);
    step_result.objective = config.block_duration_s * power;  // joules
    step_result.next = std::move(next);
    return step_result;
  };

  try {
    result.trace = sca_drive(step, point, {config.sca_epsilon, config.sca_max_iter, false});
  } catch (const InitializationError& error) {
    result.realization_feasible = false;
    result.failure_reason = error.what();
    return result;
  }
  result.plan = std::move(best);
  result.total_sca_iterations = result.trace.iterations();
  return result;
}

// --- single-block solves -------------------------------------------------

struct SingleBlockSpec {
  Framework framework = Framework::kIdecrs;
  bool with_due = false;
  std::vector<double> mue_floor;  // per active; <= 0 disables
  double due_floor = 0.0;
  std::vector<double> mue_cap;  // per active; < 0 disables
  double due_cap = -1.0;
  double efficiency_coef = -1.0;  // rate_sum >= coef * power_w
  bool maximize_weighted = false;
  std::vector<double> mue_weights;
  double due_weight = 0.0;
  double power_tie_coef = 0.0;  // subtracted as coef * power_w when maximizing
};

struct SingleBlockOutcome {
  BlockPlan plan;
  ScaTrace trace;
};

SingleBlockOutcome solve_single_block(const BlockChannels& channels, const BlockInit& init,
                                      const SingleBlockSpec& spec, const SystemConfig& config) {
  LocalPoint point;
  point.blocks.push_back(init.point);

  BlockPlan best;
  const auto step = [&](const LocalPoint& local, int) -> ScaStep {
    conic::ConicProgram program;
    detail::BlockHandles handles = detail::build_block(
        program, channels, local.blocks[0], {spec.framework, spec.with_due}, "t");

    for (int i = 0; i < channels.k_t(); ++i) {
      if (!spec.mue_floor.empty() && spec.mue_floor[i] > 0.0)
        program.add_nonneg(handles.mue_rate[i] - conic::LinExpr(spec.mue_floor[i]));
      if (!spec.mue_cap.empty() && spec.mue_cap[i] >= 0.0)
        program.add_nonneg(conic::LinExpr(spec.mue_cap[i]) - handles.mue_rate[i]);
    }
    if (spec.due_floor > 0.0 && handles.has_due)
      program.add_nonneg(handles.due_rate - conic::LinExpr(spec.due_floor));
    if (spec.due_cap >= 0.0 && handles.has_due)
      program.add_nonneg(conic::LinExpr(spec.due_cap) - handles.due_rate);
    if (spec.efficiency_coef >= 0.0) {
      conic::LinExpr rate_sum = handles.due_rate;
      for (const auto& rate : handles.mue_rate) rate_sum += rate;
      rate_sum -= spec.efficiency_coef * handles.power_w;
      program.add_nonneg(rate_sum);
    }

    conic::LinExpr objective;
    if (spec.maximize_weighted) {
      for (int i = 0; i < channels.k_t(); ++i)
        objective -= spec.mue_weights[i] * handles.mue_rate[i];
      objective -= spec.due_weight * handles.due_rate;
      objective += spec.power_tie_coef * handles.power_w;
    } else {
      objective = handles.power_w;
    }
    program.set_objective(objective);

    const conic::SolveOutcome outcome = program.solve(solver_options(config));
    ScaStep step_result;
    step_result.status = outcome.status;
    step_result.max_residual = outcome.max_residual;
    if (outcome.status != conic::SolveStatus::kOptimal) return step_result;

    BlockPlan block =
        detail::extract_block(handles.vars, channels, outcome.primal, spec.framework);
    LocalPoint next;
    next.blocks.push_back(detail::refresh_local(block, channels, spec.framework));
    const double power = detail::block_power_w(block);
    if (spec.maximize_weighted) {
      double value = 0.0;
      for (std::size_t i = 0; i < block.active.size(); ++i)
        value += spec.mue_weights[i] * (block.alpha_c[i] + block.alpha_p[i]);
      double due = 0.0;
      if (spec.framework == Framework::kCrs) {
        due = block.crs_due_content;
      } else {
        for (double m : block.mu) due += m;
      }
      value += spec.due_weight * due;
      value -= spec.power_tie_coef * power;
      step_result.objective = value;
    } else {
      step_result.objective = config.block_duration_s * power;
    }
    best = std::move(block);
    step_result.next = std::move(next);
    return step_result;
  };

  SingleBlockOutcome outcome;
  outcome.trace = sca_drive(step, point,
                            {config.sca_epsilon, config.sca_max_iter, spec.maximize_weighted});
  outcome.plan = std::move(best);
  return outcome;
}

BlockStepResult noop_step(const SystemConfig& config) {
  BlockStepResult result;
  result.delivered_mue.assign(config.n_mues, 0.0);
  return result;
}

// Shared shape of EDT, CRS, and the flush: energy minimization with
// per-block rate floors. Residuals of unservable UEs carry forward.
BlockStepResult floor_step(const BlockChannels& channels, ResidualState& residuals,
                           int divisor, Framework framework, const SystemConfig& config) {
  BlockStepResult result = noop_step(config);
  if (channels.k_t() == 0 || residuals.exhausted(kResidualTol)) return result;

  std::vector<double> floors(channels.k_t(), 0.0);
  bool any_demand = false;
  for (int i = 0; i < channels.k_t(); ++i) {
    const double residual = residuals.mue[channels.active[i]];
    if (residual > kResidualTol) {
      floors[i] = residual / divisor;
      any_demand = true;
    }
  }
  double due_floor = 0.0;
  std::vector<double> due_shares(channels.k_full(), 0.0);
  if (residuals.due > kResidualTol) {
    if (channels.k_full() >= 1) {
      due_floor = residuals.due / divisor;
      std::fill(due_shares.begin(), due_shares.end(), due_floor / channels.k_full());
      any_demand = true;
    } else {
      result.due_deferred = true;
    }
  }
  if (!any_demand) return result;

  BlockInit init;
  try {
    init = make_block_init(channels, floors, due_shares, framework);
  } catch (const InfeasibleTargetsError&) {
    if (due_floor > 0.0) {
      // Drop the dUE portion for this block and carry its residual.
      std::fill(due_shares.begin(), due_shares.end(), 0.0);
      due_floor = 0.0;
      result.due_deferred = true;
      init = make_block_init(channels, floors, due_shares, framework);
    } else {
      throw;
    }
  }

  SingleBlockSpec spec;
  spec.framework = framework;
  spec.with_due = due_floor > 0.0 && channels.k_full() >= 1;
  spec.mue_floor = floors;
  spec.due_floor = due_floor;

  SingleBlockOutcome outcome = solve_single_block(channels, init, spec, config);
  result.plan = std::move(outcome.plan);
  result.trace = std::move(outcome.trace);
  result.solved = true;
  delivered_rates(result.plan, channels, framework, &result.delivered_mue,
                  &result.delivered_due);
  residuals.consume(result.delivered_mue, result.delivered_due);
  return result;
}

}  // namespace

AlgorithmResult genie_solve(const ChannelRealization& channels, const SystemConfig& config) {
  return joint_energy_solve(channels, config, Framework::kIdecrs);
}

AlgorithmResult decrs_genie_solve(const ChannelRealization& channels,
                                  const SystemConfig& config) {
  return joint_energy_solve(channels, config, Framework::kDecrs);
}

EfficiencyProfile compute_delta(const SystemConfig& config, int n_calibration_trials,
                                std::uint64_t seed_base) {
  if (n_calibration_trials < 1) throw DimensionError("compute_delta: need at least one trial");
  double energy_total = 0.0;
  int feasible = 0, infeasible = 0;
  for (int i = 0; i < n_calibration_trials; ++i) {
    const std::uint64_t seed = derive_seed(seed_base, 0xCA11, static_cast<std::uint64_t>(i));
    const ChannelRealization realization = sample_realization(config, seed);
    const AlgorithmResult result = genie_solve(realization, config);
    if (!result.realization_feasible) {
      ++infeasible;
      continue;
    }
    double energy = 0.0;
    for (const BlockPlan& block : result.plan.blocks)
      energy += block_energy(block, config.block_duration_s);
    energy_total += energy;
    ++feasible;
  }
  if (feasible == 0)
    throw std::runtime_error("compute_delta: every calibration trial was infeasible");

  EfficiencyProfile profile;
  profile.delta = total_demand(config) / (energy_total / feasible);
  profile.s = config.eco_s;
  profile.calibration_trials = feasible;
  profile.infeasible_calibration_trials = infeasible;
  profile.energy_bound = total_demand(config) / (profile.s * profile.delta);
  return profile;
}

double eco_energy_bound(const SystemConfig& config, const EfficiencyProfile& profile) {
  if (profile.delta <= 0.0) throw DimensionError("eco_energy_bound: delta must be positive");
  return total_demand(config) / (config.eco_s * profile.delta);
}

BlockStepResult eco_step(const BlockChannels& channels, ResidualState& residuals,
                         const EfficiencyProfile& profile, int blocks_remaining,
                         const SystemConfig& config) {
  if (blocks_remaining < 1) throw DimensionError("eco_step: blocks_remaining must be >= 1");
  BlockStepResult result = noop_step(config);
  if (channels.k_t() == 0 || residuals.exhausted(kResidualTol)) return result;

  const int r = channels.k_full();
  std::vector<double> init_targets(channels.k_t(), 0.0);
  for (int i = 0; i < channels.k_t(); ++i)
    init_targets[i] = std::max(0.0, residuals.mue[channels.active[i]]) / blocks_remaining;

  const bool due_possible = residuals.due > kResidualTol && r >= 1;
  if (residuals.due > kResidualTol && r == 0) result.due_deferred = true;

  // Initial relay shares: even-split residual, trimmed to what the flat
  // 0 dBm start can carry so the assignment stays valid before scaling.
  std::vector<double> init_shares(r, 0.0);
  if (due_possible) {
    std::vector<std::complex<double>> flat(r);
    for (int j = 0; j < r; ++j) flat[j] = std::sqrt(1e-3);
    for (int j = 0; j < r; ++j) {
      const double flat_rate = relay_rate(channels.g, flat, j);
      init_shares[j] = std::min(residuals.due / (blocks_remaining * r), 0.999 * flat_rate);
    }
  }

  BlockInit init = make_block_init(channels, init_targets, init_shares, Framework::kIdecrs);
  if (due_possible)
    for (int j = 0; j < r; ++j) init.beta_p[j] = residuals.due / r;  // assignment caps

  BlockInit scaled;
  try {
    scaled = eco_feasible_init(init, channels, profile, config);
  } catch (const EfficiencyInfeasibleError&) {
    // The blended ray may undershoot the reachable efficiency; retry with
    // everything on the best single mUE before declaring the block dead.
    int best = -1;
    double best_gain = 0.0;
    for (int i = 0; i < channels.k_t(); ++i) {
      if (init_targets[i] <= 0.0) continue;
      const double gain = channels.h[i].squaredNorm();
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    bool recovered = false;
    if (best >= 0) {
      std::vector<double> single(channels.k_t(), 0.0);
      single[best] = init_targets[best];
      BlockInit retry =
          make_block_init(channels, single, std::vector<double>(r, 0.0), Framework::kIdecrs);
      try {
        scaled = eco_feasible_init(retry, channels, profile, config);
        recovered = true;
      } catch (const EfficiencyInfeasibleError&) {
      }
    }
    if (!recovered) {
      // No transmission can meet the floor: the zero plan is the optimum of
      // this block (rates >= s*delta*P holds with equality at P = 0).
      return result;
    }
  }

  SingleBlockSpec spec;
  spec.framework = Framework::kIdecrs;
  spec.with_due = due_possible;
  spec.mue_cap.resize(channels.k_t());
  spec.mue_weights.resize(channels.k_t());
  for (int i = 0; i < channels.k_t(); ++i) {
    const int k = channels.active[i];
    spec.mue_cap[i] = residuals.mue[k];
    spec.mue_weights[i] = residuals.weight_mue(k, config);
  }
  spec.due_cap = residuals.due;
  spec.due_weight = residuals.weight_due(config);
  spec.efficiency_coef = profile.s * profile.delta * config.block_duration_s;
  spec.maximize_weighted = true;
  spec.power_tie_coef = kEcoTieBreak * spec.efficiency_coef;

  SingleBlockOutcome outcome = solve_single_block(channels, scaled, spec, config);
  result.plan = std::move(outcome.plan);
  result.trace = std::move(outcome.trace);
  result.solved = true;
  delivered_rates(result.plan, channels, Framework::kIdecrs, &result.delivered_mue,
                  &result.delivered_due);
  residuals.consume(result.delivered_mue, result.delivered_due);
  return result;
}

BlockStepResult edt_step(const BlockChannels& channels, ResidualState& residuals,
                         int blocks_remaining, const SystemConfig& config) {
  if (blocks_remaining < 1) throw DimensionError("edt_step: blocks_remaining must be >= 1");
  const int divisor = blocks_remaining <= config.edt_buffer + 1 ? 1 : blocks_remaining;
  return floor_step(channels, residuals, divisor, Framework::kIdecrs, config);
}

BlockStepResult crs_step(const BlockChannels& channels, ResidualState& residuals,
                         int blocks_remaining, const SystemConfig& config) {
  if (blocks_remaining < 1) throw DimensionError("crs_step: blocks_remaining must be >= 1");
  const int divisor = blocks_remaining <= config.edt_buffer + 1 ? 1 : blocks_remaining;
  return floor_step(channels, residuals, divisor, Framework::kCrs, config);
}

BlockStepResult final_flush(const BlockChannels& unblocked, ResidualState& residuals,
                            Framework framework, const SystemConfig& config) {
  return floor_step(unblocked, residuals, 1, framework, config);
}

}  // namespace crsopt
