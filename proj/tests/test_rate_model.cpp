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

#include "crsopt/rate_model.hpp"
#include "support.hpp"

using namespace crsopt;

namespace {

Eigen::VectorXcd cvec2(std::complex<double> a, std::complex<double> b) {
  Eigen::VectorXcd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("common_rate examples") {
  const Eigen::VectorXcd h = cvec2(1, 0);
  CHECK(common_rate(h, cvec2(std::sqrt(3.0), 0), {cvec2(0, 0)}) == doctest::Approx(2.0));
  CHECK(common_rate(h, cvec2(0, 0), {cvec2(1, 0)}) == doctest::Approx(0.0));
  CHECK(common_rate(h, cvec2(1, 0), {cvec2(1, 0)}) ==
        doctest::Approx(std::log2(1.5)).epsilon(1e-12));
}

TEST_CASE("private_rate examples") {
  const Eigen::VectorXcd h = cvec2(1, 0);
  CHECK(private_rate(h, {cvec2(2, 0)}, 0) == doctest::Approx(std::log2(5.0)));

  // orthogonal privates aligned with orthogonal channels decouple
  const Eigen::VectorXcd h1 = cvec2(1, 0), h2 = cvec2(0, 1);
  const std::vector<Eigen::VectorXcd> f = {cvec2(std::sqrt(3.0), 0), cvec2(0, std::sqrt(7.0))};
  CHECK(private_rate(h1, f, 0) == doctest::Approx(2.0));
  CHECK(private_rate(h2, f, 1) == doctest::Approx(3.0));

  CHECK(private_rate(h, {cvec2(1, 0), cvec2(1, 0)}, 0) == doctest::Approx(std::log2(1.5)));
}

TEST_CASE("relay_rate examples") {
  CHECK(relay_rate({1.0}, {std::sqrt(3.0)}, 0) == doctest::Approx(2.0));
  CHECK(relay_rate({1.0}, {0.0}, 0) == doctest::Approx(0.0));
  CHECK(relay_rate({1.0, 1.0}, {1.0, 1.0}, 0) == doctest::Approx(std::log2(1.5)));
  CHECK(relay_rate({1.0, 1.0}, {1.0, 1.0}, 1) == doctest::Approx(std::log2(1.5)));
}

TEST_CASE("due_block_rate examples") {
  CHECK(due_block_rate({1.5}, {2.0}) == doctest::Approx(1.5));
  CHECK(due_block_rate({}, {}) == doctest::Approx(0.0));
  CHECK(due_block_rate({1.0, 2.0}, {2.0, 1.0}) == doctest::Approx(2.0));
}

TEST_CASE("due_block_rate bounded by both sums") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> beta(4), r2(4);
    double beta_sum = 0, r2_sum = 0;
    for (int i = 0; i < 4; ++i) {
      beta[i] = u(rng);
      r2[i] = u(rng);
      beta_sum += beta[i];
      r2_sum += r2[i];
    }
    const double rate = due_block_rate(beta, r2);
    CHECK(rate <= beta_sum + 1e-12);
    CHECK(rate <= r2_sum + 1e-12);
  }
}

TEST_CASE("block_energy arithmetic and homogeneity") {
  BlockPlan block;
  CHECK(block_energy(block, 1.0) == doctest::Approx(0.0));

  block.common = cvec2(1, 0);                       // power 1
  block.privates = {cvec2(1, 0)};                   // power 1
  block.relay = {std::complex<double>(1.0, 0.0)};   // power 1
  CHECK(block_energy(block, 1.0) == doctest::Approx(3.0));
  CHECK(block_energy(block, 0.4e-3) == doctest::Approx(0.4e-3 * 3.0));
}

TEST_CASE("rates invariant to per-precoder phase rotation, monotone SIC") {
  std::mt19937_64 rng(17);
  const Eigen::VectorXcd h = testing::random_cvec(4, rng);
  std::vector<Eigen::VectorXcd> f = {testing::random_cvec(4, rng), testing::random_cvec(4, rng)};
  const Eigen::VectorXcd fc = testing::random_cvec(4, rng);

  const double base_common = common_rate(h, fc, f);
  const double base_private = private_rate(h, f, 0);
  const std::complex<double> rot = std::exp(std::complex<double>(0, 1.234));
  std::vector<Eigen::VectorXcd> f_rot = {rot * f[0], f[1]};
  CHECK(private_rate(h, f_rot, 0) == doctest::Approx(base_private).epsilon(1e-12));
  CHECK(common_rate(h, rot * fc, f) == doctest::Approx(base_common).epsilon(1e-12));

  // growing the common precoder leaves the private rate untouched (SIC)
  CHECK(private_rate(h, f, 0) == doctest::Approx(base_private));
  CHECK(common_rate(h, 3.0 * fc, f) > base_common);
}

TEST_CASE("decrs rates: zero precoders, orthogonal decoupling, K=1 shape") {
  // zero precoders -> zero rates
  ChannelRealization r = testing::synthetic_realization(
      {{cvec2(1, 0), cvec2(0, 1)}}, {{1.0, 1.0}});
  BlockPlan block;
  block.active = {0, 1};
  block.relaying = {0, 1};
  block.layer1 = {cvec2(0, 0), cvec2(0, 0)};
  block.privates = {cvec2(0, 0), cvec2(0, 0)};
  block.relay = {0.0, 0.0};
  block.alpha_c = {0, 0};
  block.alpha_p = {0, 0};
  block.beta_c = {0, 0};
  block.beta_p = {0, 0};
  block.mu = {0, 0};
  const BlockRates zero = decrs_block_rates(r, 0, block);
  CHECK(zero.mue[0] == 0.0);
  CHECK(zero.due == 0.0);

  // K=1: the DeCRS layer rates match the iDeCRS common/private pair built
  // from the same two precoders (two-layer superposition to one receiver).
  ChannelRealization r1 = testing::synthetic_realization({{cvec2(1, 0)}}, {{0.0}});
  const Eigen::VectorXcd f1 = cvec2(std::sqrt(2.0), 0), f2 = cvec2(1, 0);
  const double layer1 = common_rate(cvec2(1, 0), f1, {f2});
  const double layer2 = private_rate(cvec2(1, 0), {f2}, 0);
  CHECK(layer1 == doctest::Approx(std::log2(1 + 2.0 / 2.0)));
  CHECK(layer2 == doctest::Approx(std::log2(2.0)));
}

TEST_CASE("crs rates: degenerate content, half share, no relays") {
  ChannelRealization r = testing::synthetic_realization({{cvec2(1, 0)}}, {{1.0}});
  BlockPlan block;
  block.active = {0};
  block.relaying = {0};
  block.common = cvec2(std::sqrt(3.0), 0);
  block.privates = {cvec2(0, 0)};
  block.relay = {std::sqrt(3.0)};
  block.alpha_c = {0.0};
  block.alpha_p = {0.0};

  // content fully dUE: min(content, phase1, phase2)
  block.crs_due_content = 1.5;
  BlockRates rates = crs_block_rates(r, 0, block);
  CHECK(rates.due == doctest::Approx(1.5));  // phase1 = phase2 = 2 >= 1.5

  // half mUE / half dUE content, relay bottleneck -> half the relayed rate
  block.alpha_c = {2.0};
  block.crs_due_content = 2.0;
  block.relay = {1.0};  // phase2 = 1
  rates = crs_block_rates(r, 0, block);
  CHECK(rates.due == doctest::Approx(0.5 * std::log2(2.0)));

  // no relays with mUE->dUE links -> zero dUE rate
  block.relaying = {};
  block.relay = {};
  rates = crs_block_rates(r, 0, block);
  CHECK(rates.due == 0.0);
}

TEST_CASE("verify_plan trivial plans") {
  ChannelRealization r = testing::unit_awgn_realization(1);
  SystemConfig config = testing::unit_awgn_config(1, 0.0);

  TransmitPlan plan;
  plan.blocks.resize(1);
  RateReport report = verify_plan(plan, r, config, 1e-5);
  CHECK(report.feasible);
  CHECK(report.total_energy == 0.0);

  config.throughput_mue = 2.0;
  report = verify_plan(plan, r, config, 1e-5);
  CHECK_FALSE(report.feasible);
  CHECK(report.max_violation == doctest::Approx(2.0));
}

TEST_CASE("verify_plan catches decodability violations") {
  ChannelRealization r = testing::unit_awgn_realization(1);
  SystemConfig config = testing::unit_awgn_config(1, 1.0);

  TransmitPlan plan;
  BlockPlan block;
  block.active = {0};
  Eigen::VectorXcd f(1);
  f(0) = 1.0;  // supports log2(2) = 1 bit
  block.privates = {f};
  block.common = Eigen::VectorXcd::Zero(1);
  block.alpha_c = {0.0};
  block.alpha_p = {1.5};  // over-allocated
  block.rate_common = {0.0};
  block.rate_private = {1.0};
  block.gamma_c = {2.0};
  block.gamma_p = {1.0};
  plan.blocks = {block};
  const RateReport report = verify_plan(plan, r, config, 1e-5);
  CHECK_FALSE(report.feasible);
  CHECK(report.max_violation == doctest::Approx(0.5));
  CHECK(report.worst_constraint == "private decodability (1-b)");
}

TEST_CASE("plan json round trip") {
  TransmitPlan plan;
  plan.framework = Framework::kIdecrs;
  plan.channel_scale = 2.5;
  BlockPlan block;
  block.active = {0, 2};
  block.relaying = {2};
  block.common = cvec2({1.0, -2.0}, {0.5, 3.0});
  block.privates = {cvec2(1, 0), cvec2(0, 1)};
  block.relay = {std::complex<double>(0.25, -0.75)};
  block.alpha_c = {0.1, 0.2};
  block.alpha_p = {0.3, 0.4};
  block.beta_c = {0.05};
  block.beta_p = {0.06};
  block.mu = {0.05};
  block.rate_common = {1.0, 2.0};
  block.rate_private = {0.5, 0.25};
  block.rate_relay = {0.75};
  block.gamma_c = {1.5, 1.25};
  block.gamma_p = {1.0, 1.1};
  block.gamma_d = {1.0};
  plan.blocks = {block};

  const TransmitPlan parsed = plan_from_json(plan_to_json(plan));
  CHECK(parsed.framework == Framework::kIdecrs);
  CHECK(parsed.channel_scale == 2.5);
  REQUIRE(parsed.blocks.size() == 1);
  CHECK(parsed.blocks[0].active == block.active);
  CHECK(parsed.blocks[0].common(1) == block.common(1));
  CHECK(parsed.blocks[0].relay[0] == block.relay[0]);
  CHECK(parsed.blocks[0].mu == block.mu);
  CHECK(parsed.blocks[0].gamma_d == block.gamma_d);
}
