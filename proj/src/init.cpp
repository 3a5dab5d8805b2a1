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
#include <complex>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "crsopt/algorithms.hpp"
#include "crsopt/errors.hpp"
#include "surrogate.hpp"

namespace crsopt {

namespace {

constexpr double kRelayInitPowerW = 1e-3;  // 0 dBm
constexpr double kFixedPointTol = 1e-12;
constexpr int kFixedPointCap = 100000;

double abs2(const std::complex<double>& z) { return std::norm(z); }

}  // namespace

BlockChannels BlockChannels::from_realization(const ChannelRealization& channels, int t) {
  BlockChannels out;
  out.n_antennas = channels.n_antennas;
  for (int k = 0; k < channels.n_mues(); ++k) {
    if (!channels.active(t, k)) continue;
    out.active.push_back(k);
    out.h.push_back(channels.h[t][k]);
    if (channels.full_path(t, k)) {
      out.relaying.push_back(k);
      out.g.push_back(channels.g[t][k]);
    }
  }
  return out;
}

BlockChannels BlockChannels::unblocked(const ChannelRealization& channels, int t) {
  BlockChannels out;
  out.n_antennas = channels.n_antennas;
  for (int k = 0; k < channels.n_mues(); ++k) {
    out.active.push_back(k);
    out.h.push_back(channels.h_unmasked[t][k]);
    out.relaying.push_back(k);
    out.g.push_back(channels.g_unmasked[t][k]);
  }
  return out;
}

ResidualState ResidualState::initial(const SystemConfig& config) {
  ResidualState state;
  state.mue.assign(config.n_mues, config.throughput_mue);
  state.due = config.throughput_due;
  return state;
}

double ResidualState::weight_mue(int k, const SystemConfig& config) const {
  return config.throughput_mue > 0.0 ? mue[k] / config.throughput_mue : 0.0;
}

double ResidualState::weight_due(const SystemConfig& config) const {
  return config.throughput_due > 0.0 ? due / config.throughput_due : 0.0;
}

void ResidualState::consume(const std::vector<double>& mue_rates, double due_rate) {
  for (std::size_t k = 0; k < mue.size(); ++k)
    mue[k] = std::max(0.0, mue[k] - mue_rates[k]);
  due = std::max(0.0, due - due_rate);
}

bool ResidualState::exhausted(double tol) const {
  if (due > tol) return false;
  return std::all_of(mue.begin(), mue.end(), [tol](double d) { return d <= tol; });
}

Eigen::VectorXcd SdmaSolution::beamformer(int i) const {
  return std::sqrt(powers[i]) * directions[i];
}

SdmaSolution sdma_init(const std::vector<Eigen::VectorXcd>& channels,
                       const std::vector<double>& sinr_targets) {
  const int k_users = static_cast<int>(channels.size());
  if (k_users == 0) throw DimensionError("sdma_init: no channels");
  if (sinr_targets.size() != channels.size())
    throw DimensionError("sdma_init: target count mismatch");
  for (double xi : sinr_targets)
    if (xi <= 0.0) throw DimensionError("sdma_init: SINR targets must be positive");
  const Eigen::Index n = channels.front().size();

  // Uplink-downlink duality fixed point for the multipliers.
  std::vector<double> lambda(k_users);
  for (int k = 0; k < k_users; ++k) lambda[k] = sinr_targets[k] / channels[k].squaredNorm();
  Eigen::MatrixXcd a(n, n);
  int iteration = 0;
  for (; iteration < kFixedPointCap; ++iteration) {
    a = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < k_users; ++k)
      a += lambda[k] * channels[k] * channels[k].adjoint();
    const Eigen::MatrixXcd a_inv = a.inverse();
    double max_change = 0.0;
    for (int k = 0; k < k_users; ++k) {
      const double quad = std::real(channels[k].dot(a_inv * channels[k]));
      const double next = 1.0 / ((1.0 + 1.0 / sinr_targets[k]) * quad);
      max_change = std::max(max_change, std::abs(next - lambda[k]) / std::max(1e-30, lambda[k]));
      lambda[k] = next;
    }
    if (max_change < kFixedPointTol) break;
  }
  if (iteration == kFixedPointCap)
    throw std::runtime_error("sdma_init: fixed point did not converge");

  a = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < k_users; ++k) a += lambda[k] * channels[k] * channels[k].adjoint();
  const Eigen::MatrixXcd a_inv = a.inverse();

  SdmaSolution solution;
  solution.multipliers = lambda;
  solution.directions.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    Eigen::VectorXcd dir = a_inv * channels[k];
    solution.directions[k] = dir / dir.norm();
  }

  Eigen::MatrixXd m(k_users, k_users);
  for (int i = 0; i < k_users; ++i) {
    for (int j = 0; j < k_users; ++j) {
      const double gain = abs2(channels[i].dot(solution.directions[j]));
      m(i, j) = i == j ? gain / sinr_targets[i] : -gain;
    }
  }
  const Eigen::VectorXd p = m.fullPivLu().solve(Eigen::VectorXd::Ones(k_users));
  if (!(m * p - Eigen::VectorXd::Ones(k_users)).isZero(1e-8) || (p.array() <= 0.0).any())
    throw InfeasibleTargetsError("sdma_init: no positive power vector meets the targets");
  solution.powers.assign(p.data(), p.data() + k_users);
  return solution;
}

Eigen::VectorXcd common_init(const std::vector<Eigen::VectorXcd>& channels,
                             const std::vector<double>& private_powers) {
  if (channels.empty()) throw DimensionError("common_init: no channels");
  const Eigen::Index n = channels.front().size();
  Eigen::MatrixXcd h_matrix(n, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < channels.size(); ++k) h_matrix.col(k) = channels[k];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_matrix, Eigen::ComputeThinU);
  const Eigen::VectorXcd u = svd.matrixU().col(0);
  const double mean_power = private_powers.empty()
                                ? 0.0
                                : std::accumulate(private_powers.begin(), private_powers.end(),
                                                  0.0) /
                                      static_cast<double>(private_powers.size());
  return std::sqrt(mean_power) * u;
}

std::optional<RateSplitTargets> initial_rate_split(const ChannelRealization& channels,
                                                   const SystemConfig& config,
                                                   std::string* reason) {
  const int t_blocks = channels.n_blocks();
  const int k_mues = channels.n_mues();
  RateSplitTargets targets;
  targets.mue_target.assign(t_blocks, std::vector<double>(k_mues, 0.0));
  targets.due_share.assign(t_blocks, std::vector<double>(k_mues, 0.0));

  const int t_due = channels.blocks_with_full_path();
  if (config.throughput_due > 0.0 && t_due == 0) {
    if (reason) *reason = "dUE demand but no block has a full AP-mUE-dUE path";
    return std::nullopt;
  }
  for (int k = 0; k < k_mues; ++k) {
    const int t_k = channels.blocks_with_ap_link(k);
    if (config.throughput_mue > 0.0 && t_k == 0) {
      if (reason) *reason = "mUE " + std::to_string(k) + " has no serving block";
      return std::nullopt;
    }
    for (int t = 0; t < t_blocks; ++t)
      if (channels.active(t, k) && config.throughput_mue > 0.0)
        targets.mue_target[t][k] = config.throughput_mue / t_k;
  }
  if (config.throughput_due > 0.0) {
    for (int t = 0; t < t_blocks; ++t) {
      if (channels.k_full_t[t] == 0) continue;
      const double share = config.throughput_due / (t_due * channels.k_full_t[t]);
      for (int k = 0; k < k_mues; ++k)
        if (channels.full_path(t, k)) targets.due_share[t][k] = share;
    }
  }
  return targets;
}

namespace {

// Relay powers meeting the per-relay SINR targets in the scalar
// interference channel. Prefers the flat 0 dBm start when it already meets
// every target; otherwise inverts the power-control system.
std::vector<double> relay_powers(const std::vector<std::complex<double>>& g,
                                 const std::vector<double>& rate_targets) {
  const int r = static_cast<int>(g.size());
  std::vector<double> powers(r, 0.0);
  if (r == 0) return powers;

  bool any_target = false;
  for (double target : rate_targets) any_target |= target > 0.0;
  if (!any_target) return powers;

  auto rate_at = [&](const std::vector<double>& p, int i) {
    double interference = 1.0;
    for (int j = 0; j < r; ++j)
      if (j != i) interference += abs2(g[j]) * p[j];
    return std::log2(1.0 + abs2(g[i]) * p[i] / interference);
  };

  std::vector<double> flat(r, kRelayInitPowerW);
  bool flat_ok = true;
  for (int i = 0; i < r; ++i) flat_ok &= rate_at(flat, i) >= rate_targets[i];
  if (flat_ok) return flat;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(r);
  for (int i = 0; i < r; ++i) {
    const double xi = std::pow(2.0, rate_targets[i]) - 1.0;
    if (xi <= 0.0) {
      m(i, i) = 1.0;  // pin unused relays to zero power
      rhs(i) = 0.0;
      continue;
    }
    for (int j = 0; j < r; ++j) m(i, j) = i == j ? abs2(g[i]) / xi : -abs2(g[j]);
  }
  const Eigen::VectorXd p = m.fullPivLu().solve(rhs);
  if (!(m * p - rhs).isZero(1e-8) || (p.array() < -1e-15).any())
    throw InfeasibleTargetsError("relay targets infeasible for this block");
  for (int i = 0; i < r; ++i) powers[i] = std::max(0.0, p(i));
  return powers;
}

}  // namespace

BlockInit make_block_init(const BlockChannels& channels,
                          const std::vector<double>& mue_targets,
                          const std::vector<double>& due_shares, Framework framework) {
  const int n = channels.k_t();
  const int r = channels.k_full();
  if (static_cast<int>(mue_targets.size()) != n ||
      static_cast<int>(due_shares.size()) != r)
    throw DimensionError("make_block_init: target sizes do not match the block");

  auto relay_index_of_active = [&](int i) {
    for (int j = 0; j < r; ++j)
      if (channels.relaying[j] == channels.active[i]) return j;
    return -1;
  };

  // Combined per-receiver targets for the SDMA beamformers. CRS carries no
  // dUE content on the privates.
  std::vector<double> combined(n, 0.0);
  for (int i = 0; i < n; ++i) {
    combined[i] = mue_targets[i];
    const int ri = relay_index_of_active(i);
    if (framework != Framework::kCrs && ri >= 0) combined[i] += due_shares[ri];
  }

  std::vector<Eigen::VectorXcd> sdma_channels;
  std::vector<double> sdma_targets;
  std::vector<int> sdma_index(n, -1);
  for (int i = 0; i < n; ++i) {
    if (combined[i] <= 0.0) continue;
    sdma_index[i] = static_cast<int>(sdma_channels.size());
    sdma_channels.push_back(channels.h[i]);
    sdma_targets.push_back(std::pow(2.0, combined[i]) - 1.0);
  }

  std::vector<Eigen::VectorXcd> privates(n, Eigen::VectorXcd::Zero(channels.n_antennas));
  std::vector<double> private_powers(n, 0.0);
  if (!sdma_channels.empty()) {
    const SdmaSolution sdma = sdma_init(sdma_channels, sdma_targets);
    for (int i = 0; i < n; ++i) {
      if (sdma_index[i] < 0) continue;
      privates[i] = sdma.beamformer(sdma_index[i]);
      private_powers[i] = sdma.powers[sdma_index[i]];
    }
  }

  // External interference at each receiver under the SDMA solution.
  std::vector<double> external(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) external[i] += abs2(channels.h[i].dot(privates[j]));

  BlockInit init;
  init.alpha_c.assign(n, 0.0);
  init.alpha_p = mue_targets;
  init.beta_c.assign(r, 0.0);
  init.beta_p.assign(r, 0.0);
  init.mu.assign(r, 0.0);

  BlockPlan plan;
  plan.active = channels.active;
  plan.relaying = channels.relaying;

  if (framework == Framework::kDecrs) {
    // Split each SDMA beamformer into the two successively decoded layers;
    // the stacked powers reproduce the combined-target power exactly.
    plan.layer1.assign(n, Eigen::VectorXcd::Zero(channels.n_antennas));
    plan.privates.assign(n, Eigen::VectorXcd::Zero(channels.n_antennas));
    for (int i = 0; i < n; ++i) {
      if (private_powers[i] <= 0.0) continue;
      const Eigen::VectorXcd direction = privates[i] / privates[i].norm();
      const double gain = abs2(channels.h[i].dot(direction));
      const int ri = relay_index_of_active(i);
      const double share = ri >= 0 ? due_shares[ri] : 0.0;
      const double xi2 = std::pow(2.0, mue_targets[i]) - 1.0;
      const double xi1 = std::pow(2.0, share) - 1.0;
      const double p2 = xi2 * (external[i] + 1.0) / gain;
      const double p1 = xi1 * (1.0 + xi2) * (external[i] + 1.0) / gain;
      plan.privates[i] = std::sqrt(p2) * direction;
      plan.layer1[i] = std::sqrt(p1) * direction;
    }
  } else {
    plan.privates = privates;
    if (framework == Framework::kCrs) {
      const double content = std::accumulate(due_shares.begin(), due_shares.end(), 0.0);
      init.crs_due_content = content;
      Eigen::VectorXcd f_c = common_init(channels.h, private_powers);
      if (content > 0.0) {
        Eigen::VectorXcd direction;
        if (f_c.norm() > 0.0)
          direction = f_c / f_c.norm();
        else
          direction = common_init(channels.h, std::vector<double>{1.0});
        double power_needed = 0.0;
        for (int i = 0; i < n; ++i) {
          const double gamma = external[i] + abs2(channels.h[i].dot(privates[i])) + 1.0;
          const double gain = abs2(channels.h[i].dot(direction));
          power_needed =
              std::max(power_needed, (std::pow(2.0, content) - 1.0) * gamma / gain);
        }
        f_c = std::sqrt(power_needed) * direction;
      }
      plan.common = f_c;
    } else {
      plan.common = common_init(channels.h, private_powers);
    }
  }

  // Relay gains, phase-aligned to the channel.
  if (r > 0) {
    std::vector<double> relay_rate_targets(r, 0.0);
    if (framework == Framework::kCrs) {
      const double content = init.crs_due_content;
      plan.relay.assign(r, 0.0);
      if (content > 0.0) {
        double sum_gain = 0.0;
        for (int j = 0; j < r; ++j) sum_gain += std::abs(channels.g[j]);
        const double p_rel = (std::pow(2.0, content) - 1.0) / (sum_gain * sum_gain);
        for (int j = 0; j < r; ++j)
          plan.relay[j] = std::sqrt(p_rel) * std::exp(std::complex<double>(0.0, -std::arg(channels.g[j])));
      }
    } else {
      for (int j = 0; j < r; ++j) relay_rate_targets[j] = due_shares[j];
      const std::vector<double> powers = relay_powers(channels.g, relay_rate_targets);
      plan.relay.resize(r);
      for (int j = 0; j < r; ++j)
        plan.relay[j] = std::sqrt(powers[j]) *
                        std::exp(std::complex<double>(0.0, -std::arg(channels.g[j])));
      init.beta_p = due_shares;
      init.mu = due_shares;
      if (framework == Framework::kDecrs) {
        init.beta_c = due_shares;  // dUE part rides layer 1
        init.beta_p.assign(r, 0.0);
      }
    }
  }

  init.point = detail::refresh_local(plan, channels, framework);
  return init;
}

BlockInit eco_feasible_init(const BlockInit& init, const BlockChannels& channels,
                            const EfficiencyProfile& profile, const SystemConfig& config) {
  const int n = channels.k_t();
  const int r = channels.k_full();
  const double floor = profile.s * profile.delta;
  const double tau = config.block_duration_s;

  double omega = 1.0;
  for (int doubling = 0; doubling <= 60; ++doubling, omega *= 2.0) {
    // Scale the beamformers down and re-assign splits from achieved rates,
    // capped by the original targets.
    BlockPlan plan;
    plan.active = channels.active;
    plan.relaying = channels.relaying;
    plan.common = init.point.common / omega;
    plan.privates.resize(n);
    for (int i = 0; i < n; ++i) plan.privates[i] = init.point.privates[i] / omega;
    plan.relay.resize(r);
    for (int j = 0; j < r; ++j) plan.relay[j] = init.point.relay[j] / omega;

    BlockInit scaled;
    scaled.alpha_c.assign(n, 0.0);
    scaled.alpha_p.assign(n, 0.0);
    scaled.beta_c.assign(r, 0.0);
    scaled.beta_p.assign(r, 0.0);
    scaled.mu.assign(r, 0.0);
    double total_rate = 0.0;
    for (int i = 0; i < n; ++i) {
      const double achieved = private_rate(channels.h[i], plan.privates, i);
      scaled.alpha_p[i] = std::min(achieved, init.alpha_p[i]);
      total_rate += scaled.alpha_p[i];
    }
    std::vector<double> relay_achieved(r, 0.0);
    for (int j = 0; j < r; ++j) relay_achieved[j] = relay_rate(channels.g, plan.relay, j);
    for (int j = 0; j < r; ++j) {
      // beta_p headroom left by the mUE part on the private stream
      const int i = [&] {
        for (int a = 0; a < n; ++a)
          if (channels.active[a] == channels.relaying[j]) return a;
        return -1;
      }();
      const double achieved = private_rate(channels.h[i], plan.privates, i);
      const double headroom = std::max(0.0, achieved - scaled.alpha_p[i]);
      scaled.beta_p[j] = std::min({headroom, init.beta_p[j], relay_achieved[j]});
      scaled.mu[j] = scaled.beta_p[j];
      total_rate += scaled.mu[j];
    }

    const double power = detail::block_power_w(plan);
    const double energy = tau * power;
    if (energy <= 0.0 || total_rate >= floor * energy) {
      scaled.point = detail::refresh_local(plan, channels, Framework::kIdecrs);
      return scaled;
    }
  }
  throw EfficiencyInfeasibleError(
      "efficiency floor unreachable for this block at any power");
}

}  // namespace crsopt
