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

#ifndef CRSOPT_TESTS_SUPPORT_HPP
#define CRSOPT_TESTS_SUPPORT_HPP

#include <complex>
#include <random>
#include <vector>

#include "crsopt/scenario.hpp"

namespace crsopt::testing {

// Hand-built realization: h[t][k] and g[t][k] given directly, no blockage.
// Entries with zero norm count as blocked.
inline ChannelRealization synthetic_realization(
    const std::vector<std::vector<Eigen::VectorXcd>>& h,
    const std::vector<std::vector<std::complex<double>>>& g) {
  ChannelRealization r;
  const int t_blocks = static_cast<int>(h.size());
  const int k_mues = static_cast<int>(h.front().size());
  r.n_antennas = static_cast<int>(h.front().front().size());
  r.channel_scale = 1.0;
  r.h = h;
  r.g = g;
  r.h_unmasked = h;
  r.g_unmasked = g;
  r.ap_mask.assign(t_blocks, std::vector<std::uint8_t>(k_mues, 0));
  r.due_mask.assign(t_blocks, std::vector<std::uint8_t>(k_mues, 0));
  r.k_t.assign(t_blocks, 0);
  r.k_full_t.assign(t_blocks, 0);
  for (int t = 0; t < t_blocks; ++t) {
    for (int k = 0; k < k_mues; ++k) {
      const bool ap = h[t][k].norm() > 0.0;
      const bool due = std::abs(g[t][k]) > 0.0;
      r.ap_mask[t][k] = ap;
      r.due_mask[t][k] = due;
      r.k_t[t] += ap;
      r.k_full_t[t] += ap && due;
    }
  }
  return r;
}

// T blocks of a single mUE with a unit channel and no dUE link.
inline ChannelRealization unit_awgn_realization(int t_blocks) {
  Eigen::VectorXcd h(1);
  h(0) = 1.0;
  std::vector<std::vector<Eigen::VectorXcd>> hs(t_blocks, {h});
  std::vector<std::vector<std::complex<double>>> gs(t_blocks, {0.0});
  return synthetic_realization(hs, gs);
}

inline SystemConfig unit_awgn_config(int t_blocks, double demand) {
  SystemConfig config;
  config.n_antennas = 1;
  config.n_vertical = 1;
  config.n_horizontal = 1;
  config.n_mues = 1;
  config.n_blocks = t_blocks;
  config.throughput_mue = demand;
  config.throughput_due = 0.0;
  return config;
}

inline SystemConfig desk_config(int n_mues = 2, int n_blocks = 10) {
  SystemConfig config;
  config.n_antennas = 8;
  config.n_vertical = 2;
  config.n_horizontal = 4;
  config.n_mues = n_mues;
  config.n_blocks = n_blocks;
  return config;
}

inline Eigen::VectorXcd random_cvec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = std::complex<double>(normal(rng), normal(rng));
  return v;
}

}  // namespace crsopt::testing

#endif  // CRSOPT_TESTS_SUPPORT_HPP
