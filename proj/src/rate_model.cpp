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

#include "crsopt/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crsopt/errors.hpp"

namespace crsopt {

namespace {

double log2p1(double sinr) { return std::log2(1.0 + sinr); }

double abs2(const std::complex<double>& z) { return std::norm(z); }

}  // namespace

int BlockPlan::index_of_active(int k) const {
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i] == k) return static_cast<int>(i);
  return -1;
}

int BlockPlan::index_of_relaying(int k) const {
  for (std::size_t i = 0; i < relaying.size(); ++i)
    if (relaying[i] == k) return static_cast<int>(i);
  return -1;
}

double common_rate(const Eigen::VectorXcd& h_k, const Eigen::VectorXcd& f_c,
                   const std::vector<Eigen::VectorXcd>& privates) {
  if (f_c.size() == 0) return 0.0;
  double interference = 1.0;
  for (const auto& f : privates) interference += abs2(h_k.dot(f));
  return log2p1(abs2(h_k.dot(f_c)) / interference);
}

double private_rate(const Eigen::VectorXcd& h_k, const std::vector<Eigen::VectorXcd>& privates,
                    int k) {
  if (k < 0 || k >= static_cast<int>(privates.size()))
    throw DimensionError("private_rate: index out of range");
  double interference = 1.0;  // the common stream is removed by SIC
  for (int i = 0; i < static_cast<int>(privates.size()); ++i)
    if (i != k) interference += abs2(h_k.dot(privates[i]));
  return log2p1(abs2(h_k.dot(privates[k])) / interference);
}

double relay_rate(const std::vector<std::complex<double>>& g,
                  const std::vector<std::complex<double>>& f_d, int k) {
  if (g.size() != f_d.size()) throw DimensionError("relay_rate: list lengths differ");
  if (k < 0 || k >= static_cast<int>(g.size()))
    throw DimensionError("relay_rate: index out of range");
  double interference = 1.0;  // simultaneous arrival: worst-case interference
  for (int i = 0; i < static_cast<int>(g.size()); ++i)
    if (i != k) interference += abs2(g[i] * f_d[i]);
  return log2p1(abs2(g[k] * f_d[k]) / interference);
}

double due_block_rate(const std::vector<double>& beta_sums,
                      const std::vector<double>& relay_rates) {
  if (beta_sums.size() != relay_rates.size())
    throw DimensionError("due_block_rate: list lengths differ");
  double total = 0.0;
  for (std::size_t i = 0; i < beta_sums.size(); ++i)
    total += std::min(beta_sums[i], relay_rates[i]);
  return total;
}

double block_energy(const BlockPlan& block, double tau) {
  double power = block.common.squaredNorm();
  for (const auto& f : block.layer1) power += f.squaredNorm();
  for (const auto& f : block.privates) power += f.squaredNorm();
  for (const auto& f : block.relay) power += abs2(f);
  return tau * power;
}

BlockRates idecrs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block) {
  BlockRates rates;
  rates.mue.resize(block.active.size(), 0.0);
  for (std::size_t i = 0; i < block.active.size(); ++i)
    rates.mue[i] = block.alpha_c[i] + block.alpha_p[i];

  std::vector<double> beta_sums(block.relaying.size()), r2(block.relaying.size());
  std::vector<std::complex<double>> g_list(block.relaying.size());
  for (std::size_t i = 0; i < block.relaying.size(); ++i)
    g_list[i] = channels.g[t][block.relaying[i]];
  for (std::size_t i = 0; i < block.relaying.size(); ++i) {
    beta_sums[i] = block.beta_c[i] + block.beta_p[i];
    r2[i] = relay_rate(g_list, block.relay, static_cast<int>(i));
  }
  rates.due = due_block_rate(beta_sums, r2);
  return rates;
}

BlockRates decrs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block) {
  BlockRates rates;
  const std::size_t n = block.active.size();
  rates.mue.resize(n, 0.0);
  // Layer 1 is decoded against all other 2K-1 streams; layer 2 after SIC of
  // the own layer-1 stream only.
  for (std::size_t i = 0; i < n; ++i) rates.mue[i] = block.alpha_c[i] + block.alpha_p[i];

  std::vector<double> beta(block.relaying.size()), r2(block.relaying.size());
  std::vector<std::complex<double>> g_list(block.relaying.size());
  for (std::size_t i = 0; i < block.relaying.size(); ++i)
    g_list[i] = channels.g[t][block.relaying[i]];
  for (std::size_t i = 0; i < block.relaying.size(); ++i) {
    beta[i] = block.beta_c[i];
    r2[i] = relay_rate(g_list, block.relay, static_cast<int>(i));
  }
  rates.due = due_block_rate(beta, r2);
  return rates;
}

// Achievable layer rates of one DeCRS receiver.
static void decrs_layer_rates(const ChannelRealization& channels, int t, const BlockPlan& block,
                              std::size_t i, double* layer1, double* layer2) {
  const Eigen::VectorXcd& h = channels.h[t][block.active[i]];
  double other = 1.0;
  for (std::size_t j = 0; j < block.active.size(); ++j) {
    if (j == i) continue;
    other += abs2(h.dot(block.layer1[j])) + abs2(h.dot(block.privates[j]));
  }
  const double own1 = abs2(h.dot(block.layer1[i]));
  const double own2 = abs2(h.dot(block.privates[i]));
  *layer1 = log2p1(own1 / (other + own2));
  *layer2 = log2p1(own2 / other);
}

BlockRates crs_block_rates(const ChannelRealization& channels, int t, const BlockPlan& block) {
  BlockRates rates;
  const std::size_t n = block.active.size();
  rates.mue.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) rates.mue[i] = block.alpha_c[i] + block.alpha_p[i];

  double content = block.crs_due_content;
  for (double a : block.alpha_c) content += a;
  if (content <= 0.0 || block.crs_due_content <= 0.0) {
    rates.due = 0.0;
    return rates;
  }

  // The whole common codeword must survive phase 1 at every mUE and the
  // coherently combined relay link; the dUE keeps its share of it.
  double phase1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXcd& h = channels.h[t][block.active[i]];
    phase1 = std::min(phase1, common_rate(h, block.common, block.privates));
  }
  std::complex<double> combined = 0.0;
  for (std::size_t i = 0; i < block.relaying.size(); ++i)
    combined += channels.g[t][block.relaying[i]] * block.relay[i];
  const double phase2 = log2p1(abs2(combined));
  const double share = block.crs_due_content / content;
  rates.due = share * std::min({content, phase1, phase2});
  return rates;
}

std::string to_string(Framework framework) {
  switch (framework) {
    case Framework::kIdecrs: return "idecrs";
    case Framework::kCrs: return "crs";
    case Framework::kDecrs: return "decrs";
  }
  return "unknown";
}

namespace {

struct ViolationTracker {
  double worst = 0.0;
  std::string label;
  void update(double violation, const std::string& name) {
    if (violation > worst) {
      worst = violation;
      label = name;
    }
  }
};

void check_nonneg(ViolationTracker& tracker, const std::vector<double>& values,
                  const std::string& name) {
  for (double v : values) tracker.update(-v, name + " >= 0");
}

}  // namespace

RateReport verify_plan(const TransmitPlan& plan, const ChannelRealization& channels,
                       const SystemConfig& config, double tol) {
  const int t_blocks = channels.n_blocks();
  const int k_mues = channels.n_mues();
  if (static_cast<int>(plan.blocks.size()) != t_blocks)
    throw DimensionError("verify_plan: plan/channel block counts differ");

  RateReport report;
  report.mue_rates.assign(t_blocks, std::vector<double>(k_mues, 0.0));
  report.due_rates.assign(t_blocks, 0.0);
  report.block_energies.assign(t_blocks, 0.0);
  report.mue_delivered.assign(k_mues, 0.0);

  ViolationTracker tracker;
  for (int t = 0; t < t_blocks; ++t) {
    const BlockPlan& block = plan.blocks[t];
    const std::size_t n = block.active.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int k = block.active[i];
      if (!channels.active(t, k))
        throw DimensionError("verify_plan: plan serves a blocked AP link");
      if (block.privates.size() != n || block.alpha_c.size() != n || block.alpha_p.size() != n)
        throw DimensionError("verify_plan: block entry counts do not match active set");
      if (block.privates[i].size() != channels.n_antennas)
        throw DimensionError("verify_plan: precoder dimension mismatch");
    }

    check_nonneg(tracker, block.alpha_c, "alpha_c");
    check_nonneg(tracker, block.alpha_p, "alpha_p");
    check_nonneg(tracker, block.beta_c, "beta_c");
    check_nonneg(tracker, block.beta_p, "beta_p");

    BlockRates rates;
    switch (plan.framework) {
      case Framework::kIdecrs: {
        double common_content = 0.0;
        for (double a : block.alpha_c) common_content += a;
        for (double b : block.beta_c) common_content += b;
        for (std::size_t i = 0; i < n; ++i) {
          const Eigen::VectorXcd& h = channels.h[t][block.active[i]];
          if (common_content > 0.0) {
            const double rc = common_rate(h, block.common, block.privates);
            tracker.update(common_content - rc, "common decodability (1-a)");
          }
          const int r = block.index_of_relaying(block.active[i]);
          const double private_load = block.alpha_p[i] + (r >= 0 ? block.beta_p[r] : 0.0);
          const double rp = private_rate(h, block.privates, static_cast<int>(i));
          tracker.update(private_load - rp, "private decodability (1-b)");
        }
        for (int k = 0; k < k_mues; ++k) {
          // A blocked mUE->dUE link carries no dUE data (Remark 2 behavior).
          const int r = block.index_of_relaying(k);
          if (r >= 0 && !channels.full_path(t, k))
            throw DimensionError("verify_plan: relaying entry without a full path");
        }
        rates = idecrs_block_rates(channels, t, block);
        break;
      }
      case Framework::kCrs: {
        double content = block.crs_due_content;
        for (double a : block.alpha_c) content += a;
        tracker.update(-block.crs_due_content, "crs content >= 0");
        if (content > 0.0) {
          for (std::size_t i = 0; i < n; ++i) {
            const Eigen::VectorXcd& h = channels.h[t][block.active[i]];
            const double rc = common_rate(h, block.common, block.privates);
            tracker.update(content - rc, "crs common decodability");
          }
          std::complex<double> combined = 0.0;
          for (std::size_t i = 0; i < block.relaying.size(); ++i)
            combined += channels.g[t][block.relaying[i]] * block.relay[i];
          if (block.crs_due_content > 0.0)
            tracker.update(content - log2p1(abs2(combined)), "crs relay decodability");
        }
        for (std::size_t i = 0; i < n; ++i) {
          const Eigen::VectorXcd& h = channels.h[t][block.active[i]];
          const double rp = private_rate(h, block.privates, static_cast<int>(i));
          tracker.update(block.alpha_p[i] - rp, "crs private decodability");
        }
        rates = crs_block_rates(channels, t, block);
        break;
      }
      case Framework::kDecrs: {
        if (block.layer1.size() != n)
          throw DimensionError("verify_plan: DeCRS block lacks layer-1 precoders");
        for (std::size_t i = 0; i < n; ++i) {
          double r1 = 0.0, r2 = 0.0;
          decrs_layer_rates(channels, t, block, i, &r1, &r2);
          const int r = block.index_of_relaying(block.active[i]);
          const double layer1_load = block.alpha_c[i] + (r >= 0 ? block.beta_c[r] : 0.0);
          tracker.update(layer1_load - r1, "decrs layer-1 decodability");
          tracker.update(block.alpha_p[i] - r2, "decrs layer-2 decodability");
        }
        rates = decrs_block_rates(channels, t, block);
        break;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      report.mue_rates[t][block.active[i]] = rates.mue[i];
      report.mue_delivered[block.active[i]] += rates.mue[i];
    }
    report.due_rates[t] = rates.due;
    report.due_delivered += rates.due;
    report.block_energies[t] = block_energy(block, config.block_duration_s);
    report.total_energy += report.block_energies[t];
  }

  for (int k = 0; k < k_mues; ++k)
    tracker.update(config.throughput_mue - report.mue_delivered[k], "mUE throughput (1-e)");
  tracker.update(config.throughput_due - report.due_delivered, "dUE throughput (1-f)");

  report.max_violation = std::max(0.0, tracker.worst);
  report.worst_constraint = tracker.label;
  report.feasible = report.max_violation <= tol;
  return report;
}

}  // namespace crsopt
