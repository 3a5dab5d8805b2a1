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

#ifndef CRSOPT_SCENARIO_HPP
#define CRSOPT_SCENARIO_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crsopt {

enum class BlockageMode { kIndependent, kDistanceDependent };

// All scenario scalars. Throughputs are normalized (bits/s/Hz), i.e. the
// raw bit targets divided by tau*B.
struct SystemConfig {
  int n_antennas = 16;  // N = n_vertical * n_horizontal
  int n_vertical = 4;
  int n_horizontal = 4;
  int n_mues = 4;   // K
  int n_blocks = 20;  // T
  double blockage_p = 0.3;
  BlockageMode blockage_mode = BlockageMode::kIndependent;
  double carrier_freq_hz = 0.3e12;
  double block_duration_s = 0.4e-3;  // tau
  double bandwidth_hz = 1.0e9;       // B
  double pathloss_exp = 2.0;         // eta
  Eigen::Vector3d ap_position{0.0, 4.0, 1.0};
  Eigen::Vector3d due_position{8.0, 4.0, 0.0};
  Eigen::Vector3d mue_box_min{2.0, 0.0, 0.0};
  Eigen::Vector3d mue_box_max{6.0, 8.0, 0.0};
  double throughput_mue = 10.0;  // D_k, same target for every mUE
  double throughput_due = 2.0;   // D_d
  double eco_s = 0.7;
  int edt_buffer = 0;  // mu_buf: blocks before the last that target full residuals
  int delta_calibration_trials = 20;
  double sca_epsilon = 1e-3;
  int sca_max_iter = 50;
  double solver_accuracy = 1e-7;
  int solver_max_iter = 200;
  double verify_tol = 1e-5;
  // When set, every link of the last block is forced unblocked. The
  // experiment harness enables this so that the residual-data flush of the
  // per-block algorithms always has somewhere to go and all algorithms see
  // the same realization.
  bool unblocked_final_block = false;
  std::uint64_t seed = 1;

  void validate() const;  // throws DimensionError on violated invariants

  double noise_floor_w() const;     // k_B * 290 K * B
  double friis_unit_gain() const;   // (c / (4 pi f_c))^2, raw, at 1 m
  double channel_scale() const;     // 1 / sqrt(noise floor)
  double wavelength_m() const;
};

// Node placement for every block. AP and dUE are static; mUE positions are
// redrawn uniformly inside the box for each block.
struct Geometry {
  Eigen::Vector3d ap_position;
  Eigen::Vector3d due_position;
  std::vector<std::vector<Eigen::Vector3d>> mue_positions;  // [T][K]
};

// Channels for all blocks with blockage applied. Blocked entries are
// exactly zero; the pre-blockage values are kept alongside so the harness
// can build the unblocked final flush block.
struct ChannelRealization {
  int n_antennas = 0;
  std::vector<std::vector<Eigen::VectorXcd>> h;  // [T][K], zero when AP link blocked
  std::vector<std::vector<std::complex<double>>> g;  // [T][K], zero when mUE-dUE link blocked
  std::vector<std::vector<std::uint8_t>> ap_mask;   // true = link present
  std::vector<std::vector<std::uint8_t>> due_mask;
  std::vector<int> k_t;       // unblocked AP-mUE links per block (K_t)
  std::vector<int> k_full_t;  // full AP->mUE->dUE paths per block (K'_t)
  std::vector<std::vector<Eigen::VectorXcd>> h_unmasked;
  std::vector<std::vector<std::complex<double>>> g_unmasked;
  double channel_scale = 1.0;  // 1/sqrt(N0) baked into h and g

  int n_blocks() const { return static_cast<int>(h.size()); }
  int n_mues() const { return h.empty() ? 0 : static_cast<int>(h.front().size()); }
  bool active(int t, int k) const { return ap_mask[t][k] != 0; }
  bool full_path(int t, int k) const { return ap_mask[t][k] != 0 && due_mask[t][k] != 0; }
  // Blocks in which mUE k has an AP link (T_k) / with at least one full path (T_d).
  int blocks_with_ap_link(int k) const;
  int blocks_with_full_path() const;
};

// UPA steering vector: Kronecker product of the vertical ramp (increment
// pi*sin phi) and the horizontal ramp (increment pi*cos phi*cos psi).
// Every entry has unit magnitude.
Eigen::VectorXcd array_response(double phi, double psi, int n_v, int n_h);

Geometry sample_geometry(const SystemConfig& config, std::mt19937_64& rng);

ChannelRealization sample_channels(const SystemConfig& config, const Geometry& geometry,
                                   std::mt19937_64& rng);

// Convenience: geometry + channels from a single seed.
ChannelRealization sample_realization(const SystemConfig& config, std::uint64_t seed);

// Scenario file I/O (JSON, keys mirroring the field names, SI units).
SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& config, const std::string& path);
SystemConfig config_from_json(const std::string& text);
std::string config_to_json(const SystemConfig& config);

std::string to_string(BlockageMode mode);
BlockageMode blockage_mode_from_string(const std::string& name);

}  // namespace crsopt

#endif  // CRSOPT_SCENARIO_HPP
