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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crsopt/algorithms.hpp"
#include "crsopt/errors.hpp"
#include "support.hpp"

using namespace crsopt;

namespace {

double plan_energy(const TransmitPlan& plan, double tau) {
  double energy = 0.0;
  for (const BlockPlan& block : plan.blocks) energy += block_energy(block, tau);
  return energy;
}

}  // namespace

TEST_CASE("genie: zero demand yields the zero plan") {
  const ChannelRealization r = testing::unit_awgn_realization(2);
  const SystemConfig config = testing::unit_awgn_config(2, 0.0);
  const AlgorithmResult result = genie_solve(r, config);
  CHECK(result.realization_feasible);
  CHECK(plan_energy(result.plan, config.block_duration_s) == 0.0);
}

TEST_CASE("genie: single block Shannon inversion") {
  const ChannelRealization r = testing::unit_awgn_realization(1);
  const SystemConfig config = testing::unit_awgn_config(1, 2.0);
  const AlgorithmResult result = genie_solve(r, config);
  REQUIRE(result.realization_feasible);
  const double energy = plan_energy(result.plan, config.block_duration_s);
  CHECK(energy == doctest::Approx(3.0 * config.block_duration_s).epsilon(1e-4));
  const RateReport report = verify_plan(result.plan, r, config, 1e-5);
  CHECK(report.feasible);
}

TEST_CASE("genie: unservable realization is flagged, not thrown") {
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(1);
  const ChannelRealization r = testing::synthetic_realization({{zero}}, {{0.0}});
  const SystemConfig config = testing::unit_awgn_config(1, 2.0);
  const AlgorithmResult result = genie_solve(r, config);
  CHECK_FALSE(result.realization_feasible);
  CHECK(!result.failure_reason.empty());
}

TEST_CASE("genie trace is monotone non-increasing") {
  const SystemConfig config = testing::desk_config(2, 4);
  const ChannelRealization r = sample_realization(config, 31);
  const AlgorithmResult result = genie_solve(r, config);
  REQUIRE(result.realization_feasible);
  for (int i = 1; i < result.trace.iterations(); ++i)
    CHECK(result.trace.objective[i] <= result.trace.objective[i - 1] + 1e-6);
}

TEST_CASE("compute_delta matches its definition and seeds deterministically") {
  SystemConfig config = testing::desk_config(2, 4);
  const EfficiencyProfile profile = compute_delta(config, 3, 1234);
  CHECK(profile.delta > 0.0);
  CHECK(profile.calibration_trials + profile.infeasible_calibration_trials == 3);
  const EfficiencyProfile again = compute_delta(config, 3, 1234);
  CHECK(profile.delta == again.delta);

  // ratio definition: delta * mean energy = total demand
  const double total = config.n_mues * config.throughput_mue + config.throughput_due;
  CHECK(profile.energy_bound ==
        doctest::Approx(total / (config.eco_s * profile.delta)).epsilon(1e-12));
}

TEST_CASE("eco_energy_bound arithmetic") {
  SystemConfig config = testing::unit_awgn_config(1, 40.0);
  config.throughput_due = 2.0;  // total 42
  config.eco_s = 0.2;
  EfficiencyProfile profile;
  profile.delta = 1.0;
  CHECK(eco_energy_bound(config, profile) == doctest::Approx(210.0));
  config.eco_s = 0.4;
  CHECK(eco_energy_bound(config, profile) == doctest::Approx(105.0));
}

TEST_CASE("eco_step: exhausted residuals are a no-op") {
  const ChannelRealization r = testing::unit_awgn_realization(2);
  SystemConfig config = testing::unit_awgn_config(2, 1.0);
  ResidualState residuals = ResidualState::initial(config);
  residuals.mue[0] = 0.0;
  EfficiencyProfile profile;
  profile.delta = 1.0;
  profile.s = 0.5;
  const BlockChannels channels = BlockChannels::from_realization(r, 0);
  const BlockStepResult step = eco_step(channels, residuals, profile, 2, config);
  CHECK_FALSE(step.solved);
  CHECK(step.delivered_due == 0.0);
}

TEST_CASE("eco_step trace is monotone non-decreasing and meets the floor") {
  SystemConfig config = testing::desk_config(2, 6);
  config.eco_s = 0.3;
  const ChannelRealization r = sample_realization(config, 97);
  const EfficiencyProfile profile = compute_delta(config, 5, 555);
  ResidualState residuals = ResidualState::initial(config);
  const BlockChannels channels = BlockChannels::from_realization(r, 0);
  if (channels.k_t() == 0) return;
  EfficiencyProfile used = profile;
  used.s = config.eco_s;
  const BlockStepResult step = eco_step(channels, residuals, used, config.n_blocks, config);
  if (!step.solved) return;
  for (int i = 1; i < step.trace.iterations(); ++i)
    CHECK(step.trace.objective[i] >= step.trace.objective[i - 1] - 1e-6);
  // (2.1-a): delivered rates >= s*delta*energy within solver accuracy
  double rates = step.delivered_due;
  for (double v : step.delivered_mue) rates += v;
  const double energy = block_energy(step.plan, config.block_duration_s);
  CHECK(rates >= used.s * used.delta * energy - 1e-6);
}

TEST_CASE("edt_step: residual recursion and even split") {
  const int t_blocks = 4;
  const ChannelRealization r = testing::unit_awgn_realization(t_blocks);
  const SystemConfig config = testing::unit_awgn_config(t_blocks, 2.0);
  ResidualState residuals = ResidualState::initial(config);
  double delivered_total = 0.0;
  for (int t = 0; t < t_blocks; ++t) {
    const BlockChannels channels = BlockChannels::from_realization(r, t);
    const BlockStepResult step = edt_step(channels, residuals, t_blocks - t, config);
    REQUIRE(step.solved);
    // never blocked: the per-block rate is exactly D/T
    CHECK(step.delivered_mue[0] ==
          doctest::Approx(config.throughput_mue / t_blocks).epsilon(1e-4));
    delivered_total += step.delivered_mue[0];
    CHECK(delivered_total + residuals.mue[0] ==
          doctest::Approx(config.throughput_mue).epsilon(1e-6));
  }
  CHECK(residuals.exhausted(1e-4));
}

TEST_CASE("edt_step: zero residuals are a no-op") {
  const ChannelRealization r = testing::unit_awgn_realization(1);
  const SystemConfig config = testing::unit_awgn_config(1, 0.0);
  ResidualState residuals = ResidualState::initial(config);
  const BlockChannels channels = BlockChannels::from_realization(r, 0);
  ResidualState copy = residuals;
  const BlockStepResult step = edt_step(channels, copy, 1, config);
  CHECK_FALSE(step.solved);
}

TEST_CASE("edt buffer switches to full residuals early") {
  const int t_blocks = 3;
  const ChannelRealization r = testing::unit_awgn_realization(t_blocks);
  SystemConfig config = testing::unit_awgn_config(t_blocks, 3.0);
  config.edt_buffer = 1;  // divisor 1 from the second-to-last block on
  ResidualState residuals = ResidualState::initial(config);

  BlockChannels channels = BlockChannels::from_realization(r, 0);
  BlockStepResult step = edt_step(channels, residuals, 3, config);
  CHECK(step.delivered_mue[0] == doctest::Approx(1.0).epsilon(1e-4));  // 3/3

  channels = BlockChannels::from_realization(r, 1);
  step = edt_step(channels, residuals, 2, config);  // within the buffer: full residual
  CHECK(step.delivered_mue[0] == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(residuals.exhausted(1e-4));
}

TEST_CASE("final_flush: zero residuals cost nothing, Shannon inversion otherwise") {
  const ChannelRealization r = testing::unit_awgn_realization(1);
  SystemConfig config = testing::unit_awgn_config(1, 2.0);
  ResidualState residuals = ResidualState::initial(config);
  residuals.mue[0] = 0.0;
  const BlockChannels channels = BlockChannels::unblocked(r, 0);
  BlockStepResult flush = final_flush(channels, residuals, Framework::kIdecrs, config);
  CHECK(block_energy(flush.plan, 1.0) == doctest::Approx(0.0));

  residuals.mue[0] = 2.0;
  flush = final_flush(channels, residuals, Framework::kIdecrs, config);
  REQUIRE(flush.solved);
  CHECK(block_energy(flush.plan, 1.0) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(residuals.exhausted(1e-4));
}

TEST_CASE("crs_step coincides with edt_step when there is no dUE data (K=1)") {
  const ChannelRealization r = testing::unit_awgn_realization(2);
  const SystemConfig config = testing::unit_awgn_config(2, 2.0);

  ResidualState res_a = ResidualState::initial(config);
  const BlockChannels channels = BlockChannels::from_realization(r, 0);
  const BlockStepResult edt = edt_step(channels, res_a, 2, config);

  ResidualState res_b = ResidualState::initial(config);
  const BlockStepResult crs = crs_step(channels, res_b, 2, config);

  REQUIRE(edt.solved);
  REQUIRE(crs.solved);
  CHECK(block_energy(crs.plan, 1.0) ==
        doctest::Approx(block_energy(edt.plan, 1.0)).epsilon(1e-3));
}

TEST_CASE("decrs_genie_solve matches genie at K=1") {
  const ChannelRealization r = testing::unit_awgn_realization(1);
  const SystemConfig config = testing::unit_awgn_config(1, 2.0);
  const AlgorithmResult idecrs = genie_solve(r, config);
  const AlgorithmResult decrs = decrs_genie_solve(r, config);
  REQUIRE(idecrs.realization_feasible);
  REQUIRE(decrs.realization_feasible);
  const double a = plan_energy(idecrs.plan, 1.0);
  const double b = plan_energy(decrs.plan, 1.0);
  CHECK(b == doctest::Approx(a).epsilon(1e-3));
}

TEST_CASE("decrs -MA scenario disables the relay phase") {
  SystemConfig config = testing::desk_config(2, 3);
  config.throughput_due = 0.0;  // multiple access only
  const ChannelRealization r = sample_realization(config, 7);
  const AlgorithmResult result = decrs_genie_solve(r, config);
  REQUIRE(result.realization_feasible);
  for (const BlockPlan& block : result.plan.blocks) {
    CHECK(block.relay.empty());
    for (double beta : block.beta_c) CHECK(beta == 0.0);
  }
  const RateReport report = verify_plan(result.plan, r, config, 1e-5);
  CHECK(report.feasible);
}

TEST_CASE("proposition-1 oracle: grid search prefers the even split") {
  const double demand = 2.0;
  double best_split = -1.0, best_power = 1e300;
  for (int i = 0; i <= 200; ++i) {
    const double r1 = demand * i / 200.0;
    const double power = (std::pow(2.0, r1) - 1.0) + (std::pow(2.0, demand - r1) - 1.0);
    if (power < best_power) {
      best_power = power;
      best_split = r1;
    }
  }
  CHECK(best_split == doctest::Approx(1.0).epsilon(0.011));
  CHECK(best_power == doctest::Approx(2.0).epsilon(1e-9));
}
