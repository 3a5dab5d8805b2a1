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

#ifndef CRSOPT_ALGORITHMS_HPP
#define CRSOPT_ALGORITHMS_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crsopt/rate_model.hpp"
#include "crsopt/sca.hpp"
#include "crsopt/scenario.hpp"

namespace crsopt {

// One block's channels restricted to the usable links.
struct BlockChannels {
  int n_antennas = 0;
  std::vector<int> active;    // mUE ids with AP link
  std::vector<int> relaying;  // subset of active with a full AP->mUE->dUE path
  std::vector<Eigen::VectorXcd> h;          // parallel to active
  std::vector<std::complex<double>> g;      // parallel to relaying

  int k_t() const { return static_cast<int>(active.size()); }
  int k_full() const { return static_cast<int>(relaying.size()); }

  static BlockChannels from_realization(const ChannelRealization& channels, int t);
  // All links of block t forced present, using the pre-blockage values.
  static BlockChannels unblocked(const ChannelRealization& channels, int t);
};

// Residual demand per UE plus the weights derived from it.
struct ResidualState {
  std::vector<double> mue;  // delta_k, clamped at 0
  double due = 0.0;         // delta_d

  static ResidualState initial(const SystemConfig& config);
  double weight_mue(int k, const SystemConfig& config) const;  // delta/D, 0 when D == 0
  double weight_due(const SystemConfig& config) const;
  // Decrement by delivered rates (mue_rates indexed by global mUE id).
  void consume(const std::vector<double>& mue_rates, double due_rate);
  bool exhausted(double tol = 1e-9) const;
};

// Calibrated energy efficiency and the low-s energy upper bound.
struct EfficiencyProfile {
  double delta = 0.0;  // bits/s/Hz per joule
  double s = 0.0;
  double energy_bound = 0.0;  // (sum_k D_k + D_d) / (s * delta)
  int calibration_trials = 0;
  int infeasible_calibration_trials = 0;
};

// --- Initializers -----------------------------------------------------

// Energy-minimal SDMA beamformers meeting the given SINR targets with
// equality: uplink-downlink duality fixed point for the directions, then a
// linear system for the powers. Throws InfeasibleTargetsError when no
// positive power vector exists.
struct SdmaSolution {
  std::vector<Eigen::VectorXcd> directions;  // unit norm
  std::vector<double> powers;
  std::vector<double> multipliers;  // lambda, for diagnostics

  Eigen::VectorXcd beamformer(int i) const;
};
SdmaSolution sdma_init(const std::vector<Eigen::VectorXcd>& channels,
                       const std::vector<double>& sinr_targets);

// Common precoder: dominant left singular vector of [h_1 ... h_Kt], scaled
// to the mean private power.
Eigen::VectorXcd common_init(const std::vector<Eigen::VectorXcd>& channels,
                             const std::vector<double>& private_powers);

// Per-block rate targets of the genie splitting: D_k/T_k for each active
// mUE, D_d/(T_d*K'_t) per full-path mUE. Returns nullopt (with `reason`)
// when a positive demand has no serving block.
struct RateSplitTargets {
  std::vector<std::vector<double>> mue_target;  // [T][K], 0 when inactive
  std::vector<std::vector<double>> due_share;   // [T][K], 0 unless full path
};
std::optional<RateSplitTargets> initial_rate_split(const ChannelRealization& channels,
                                                   const SystemConfig& config,
                                                   std::string* reason);

// Precoders, gammas, and split values for one block, feasible for the
// original constraints at the point itself.
struct BlockInit {
  LocalPoint::Block point;
  std::vector<double> alpha_c, alpha_p;  // parallel to active
  std::vector<double> beta_c, beta_p, mu;  // parallel to relaying
  double crs_due_content = 0.0;
};
BlockInit make_block_init(const BlockChannels& channels,
                          const std::vector<double>& mue_targets,
                          const std::vector<double>& due_shares, Framework framework);

// Shrinks the beamformers by a doubling factor omega until the efficiency
// constraint rate/energy >= s*delta holds at the scaled point. Throws
// EfficiencyInfeasibleError after 60 doublings.
BlockInit eco_feasible_init(const BlockInit& init, const BlockChannels& channels,
                            const EfficiencyProfile& profile, const SystemConfig& config);

// --- Full-horizon algorithms ------------------------------------------

struct AlgorithmResult {
  TransmitPlan plan;
  ScaTrace trace;                     // joint trace (GENIE-style runs)
  std::vector<ScaTrace> block_traces; // per-block runs
  bool realization_feasible = true;
  std::string failure_reason;
  int total_sca_iterations = 0;
};

AlgorithmResult genie_solve(const ChannelRealization& channels, const SystemConfig& config);
AlgorithmResult decrs_genie_solve(const ChannelRealization& channels,
                                  const SystemConfig& config);

// Mean GENIE efficiency over fresh calibration realizations.
// Throws std::runtime_error if every calibration trial is infeasible.
EfficiencyProfile compute_delta(const SystemConfig& config, int n_calibration_trials,
                                std::uint64_t seed_base);
double eco_energy_bound(const SystemConfig& config, const EfficiencyProfile& profile);

// --- Per-block steps ---------------------------------------------------

struct BlockStepResult {
  BlockPlan plan;
  ScaTrace trace;
  bool solved = false;       // false: no-op block (no links or no residual demand)
  bool due_deferred = false; // dUE target dropped this block (no usable path)
  std::vector<double> delivered_mue;  // indexed by global mUE id
  double delivered_due = 0.0;
};

// blocks_remaining feeds the even-split starting point (the scheme shares
// the EDT initializer before the efficiency scaling).
BlockStepResult eco_step(const BlockChannels& channels, ResidualState& residuals,
                         const EfficiencyProfile& profile, int blocks_remaining,
                         const SystemConfig& config);
BlockStepResult edt_step(const BlockChannels& channels, ResidualState& residuals,
                         int blocks_remaining, const SystemConfig& config);
BlockStepResult crs_step(const BlockChannels& channels, ResidualState& residuals,
                         int blocks_remaining, const SystemConfig& config);

// Residual-clearing energy minimization on an unblocked block (divisor 1).
BlockStepResult final_flush(const BlockChannels& unblocked, ResidualState& residuals,
                            Framework framework, const SystemConfig& config);

}  // namespace crsopt

#endif  // CRSOPT_ALGORITHMS_HPP
