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

#ifndef CRSOPT_RATE_MODEL_HPP
#define CRSOPT_RATE_MODEL_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crsopt/scenario.hpp"

namespace crsopt {

// Which two-phase framework a plan belongs to. The framework decides how
// stream rates and the dUE rate are computed from a block's entries.
enum class Framework { kIdecrs, kCrs, kDecrs };

// One block of a transmit plan. Entries exist only for mUEs with an AP
// link ("active", order fixed by the `active` index list) and relaying
// entries only for mUEs with a full AP->mUE->dUE path ("relaying").
//
// Field use by framework:
//   kIdecrs: common + privates; alpha_c/alpha_p per active entry;
//            beta_c/beta_p/mu per relaying entry.
//   kCrs:    common + privates; alpha_c/alpha_p per active entry; the
//            single dUE content rate rides `crs_due_content`; all relaying
//            mUEs retransmit the same codeword with gains `relay`.
//   kDecrs:  layer1 + privates (= layer2), no shared common; alpha_c is
//            the mUE part of layer 1, alpha_p the layer-2 rate; beta_c/mu
//            per relaying entry (dUE part of layer 1).
struct BlockPlan {
  std::vector<int> active;    // mUE ids with AP link, ascending
  std::vector<int> relaying;  // mUE ids with full path, ascending subset of active
  Eigen::VectorXcd common;    // f_c (size 0 when unused)
  std::vector<Eigen::VectorXcd> layer1;          // kDecrs only, parallel to active
  std::vector<Eigen::VectorXcd> privates;        // parallel to active
  std::vector<std::complex<double>> relay;       // parallel to relaying
  std::vector<double> alpha_c, alpha_p;          // parallel to active
  std::vector<double> beta_c, beta_p, mu;        // parallel to relaying
  double crs_due_content = 0.0;                  // kCrs only
  // Slack values from the solve, kept for diagnostics and serialization.
  std::vector<double> rate_common, rate_private;  // parallel to active
  std::vector<double> rate_relay;                 // parallel to relaying
  std::vector<double> gamma_c, gamma_p;           // parallel to active
  std::vector<double> gamma_d;                    // parallel to relaying

  int index_of_active(int k) const;    // -1 if absent
  int index_of_relaying(int k) const;  // -1 if absent
};

struct TransmitPlan {
  Framework framework = Framework::kIdecrs;
  std::vector<BlockPlan> blocks;
  double channel_scale = 1.0;  // realization scale the plan was solved against
};

// Post-hoc evaluation of a plan against the original (nonconvex)
// constraints, recomputed from primal variables only.
struct RateReport {
  std::vector<std::vector<double>> mue_rates;  // [T][K], 0 when inactive
  std::vector<double> due_rates;               // [T]
  std::vector<double> block_energies;          // [T], joules
  std::vector<double> mue_delivered;           // [K], cumulative bits/s/Hz
  double due_delivered = 0.0;
  double total_energy = 0.0;
  double max_violation = 0.0;
  std::string worst_constraint;
  bool feasible = false;
};

// Eq.-level rate functions. Noise variance is 1 by convention (the channel
// scale already absorbs the noise floor).
double common_rate(const Eigen::VectorXcd& h_k, const Eigen::VectorXcd& f_c,
                   const std::vector<Eigen::VectorXcd>& privates);
double private_rate(const Eigen::VectorXcd& h_k, const std::vector<Eigen::VectorXcd>& privates,
                    int k);
double relay_rate(const std::vector<std::complex<double>>& g,
                  const std::vector<std::complex<double>>& f_d, int k);
// Sum over k of min(beta_sum_k, relay_rate_k).
double due_block_rate(const std::vector<double>& beta_sums,
                      const std::vector<double>& relay_rates);
double block_energy(const BlockPlan& block, double tau);

// Per-framework delivered rates for one block.
struct BlockRates {
  std::vector<double> mue;  // parallel to block.active
  double due = 0.0;
};
BlockRates idecrs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block);
BlockRates decrs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block);
BlockRates crs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block);

// Checks every original constraint of the plan's framework; `tol` is the
// absolute feasibility tolerance. Throws DimensionError on shape mismatch.
RateReport verify_plan(const TransmitPlan& plan, const ChannelRealization& channels,
                       const SystemConfig& config, double tol);

// Plan serialization (JSON; complex numbers as [re, im] pairs).
std::string plan_to_json(const TransmitPlan& plan);
TransmitPlan plan_from_json(const std::string& text);
void save_plan(const TransmitPlan& plan, const std::string& path);
TransmitPlan load_plan(const std::string& path);

std::string to_string(Framework framework);

}  // namespace crsopt

#endif  // CRSOPT_RATE_MODEL_HPP
