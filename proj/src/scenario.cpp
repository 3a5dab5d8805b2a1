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

#include "crsopt/scenario.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "crsopt/errors.hpp"

namespace crsopt {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kNoiseTemperature = 290.0;

double uniform_in(double lo, double hi, std::mt19937_64& rng) {
  if (lo == hi) return lo;  // degenerate box edge
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

void SystemConfig::validate() const {
  if (n_antennas < 1 || n_vertical < 1 || n_horizontal < 1)
    throw DimensionError("antenna counts must be positive");
  if (n_antennas != n_vertical * n_horizontal)
    throw DimensionError("n_antennas must equal n_vertical * n_horizontal");
  if (n_mues < 1) throw DimensionError("n_mues must be positive");
  if (n_blocks < 1) throw DimensionError("n_blocks must be positive");
  if (blockage_p < 0.0 || blockage_p > 1.0)
    throw DimensionError("blockage_p must lie in [0, 1]");
  if (carrier_freq_hz <= 0.0 || block_duration_s <= 0.0 || bandwidth_hz <= 0.0)
    throw DimensionError("carrier frequency, block duration, and bandwidth must be positive");
  if (throughput_mue < 0.0 || throughput_due < 0.0)
    throw DimensionError("throughput targets must be nonnegative");
  if (edt_buffer < 0) throw DimensionError("edt_buffer must be nonnegative");
  for (int i = 0; i < 3; ++i) {
    if (mue_box_min[i] > mue_box_max[i])
      throw DimensionError("mue_box corners must be ordered componentwise");
  }
}

double SystemConfig::noise_floor_w() const {
  return kBoltzmann * kNoiseTemperature * bandwidth_hz;
}

double SystemConfig::friis_unit_gain() const {
  const double x = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_freq_hz);
  return x * x;
}

double SystemConfig::channel_scale() const { return 1.0 / std::sqrt(noise_floor_w()); }

double SystemConfig::wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }

int ChannelRealization::blocks_with_ap_link(int k) const {
  int count = 0;
  for (int t = 0; t < n_blocks(); ++t) count += ap_mask[t][k] != 0;
  return count;
}

int ChannelRealization::blocks_with_full_path() const {
  int count = 0;
  for (int t = 0; t < n_blocks(); ++t) count += k_full_t[t] > 0;
  return count;
}

Eigen::VectorXcd array_response(double phi, double psi, int n_v, int n_h) {
  using namespace std::complex_literals;
  const double pi = std::numbers::pi;
  Eigen::VectorXcd vertical(n_v), horizontal(n_h);
  const double v_step = pi * std::sin(phi);
  const double h_step = pi * std::cos(phi) * std::cos(psi);
  for (int m = 0; m < n_v; ++m) vertical(m) = std::exp(1i * (v_step * m));
  for (int n = 0; n < n_h; ++n) horizontal(n) = std::exp(1i * (h_step * n));
  Eigen::VectorXcd out(n_v * n_h);
  for (int m = 0; m < n_v; ++m)
    for (int n = 0; n < n_h; ++n) out(m * n_h + n) = vertical(m) * horizontal(n);
  return out;
}

Geometry sample_geometry(const SystemConfig& config, std::mt19937_64& rng) {
  config.validate();
  Geometry geometry;
  geometry.ap_position = config.ap_position;
  geometry.due_position = config.due_position;
  geometry.mue_positions.resize(config.n_blocks);
  for (int t = 0; t < config.n_blocks; ++t) {
    geometry.mue_positions[t].resize(config.n_mues);
    for (int k = 0; k < config.n_mues; ++k) {
      Eigen::Vector3d p;
      for (int i = 0; i < 3; ++i) p[i] = uniform_in(config.mue_box_min[i], config.mue_box_max[i], rng);
      geometry.mue_positions[t][k] = p;
    }
  }
  return geometry;
}

ChannelRealization sample_channels(const SystemConfig& config, const Geometry& geometry,
                                   std::mt19937_64& rng) {
  using namespace std::complex_literals;
  const int t_blocks = static_cast<int>(geometry.mue_positions.size());
  const int k_mues = t_blocks > 0 ? static_cast<int>(geometry.mue_positions.front().size()) : 0;
  if (t_blocks != config.n_blocks || k_mues != config.n_mues)
    throw DimensionError("geometry does not match the configuration");

  const double chi0 = config.friis_unit_gain();
  const double scale = config.channel_scale();
  const double eta = config.pathloss_exp;
  const double lambda = config.wavelength_m();

  // Maximum node separation for the distance-dependent mode: diagonal of
  // the bounding box containing the AP, the dUE, and the mUE box.
  Eigen::Vector3d lo = config.mue_box_min.cwiseMin(config.ap_position).cwiseMin(config.due_position);
  Eigen::Vector3d hi = config.mue_box_max.cwiseMax(config.ap_position).cwiseMax(config.due_position);
  const double d_max = (hi - lo).norm();

  ChannelRealization out;
  out.n_antennas = config.n_antennas;
  out.channel_scale = scale;
  out.h.resize(t_blocks);
  out.g.resize(t_blocks);
  out.h_unmasked.resize(t_blocks);
  out.g_unmasked.resize(t_blocks);
  out.ap_mask.assign(t_blocks, std::vector<std::uint8_t>(k_mues, 0));
  out.due_mask.assign(t_blocks, std::vector<std::uint8_t>(k_mues, 0));
  out.k_t.assign(t_blocks, 0);
  out.k_full_t.assign(t_blocks, 0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < t_blocks; ++t) {
    out.h[t].resize(k_mues);
    out.g[t].resize(k_mues);
    out.h_unmasked[t].resize(k_mues);
    out.g_unmasked[t].resize(k_mues);
    const bool force_unblocked = config.unblocked_final_block && t == t_blocks - 1;
    for (int k = 0; k < k_mues; ++k) {
      const Eigen::Vector3d& mue = geometry.mue_positions[t][k];
      const Eigen::Vector3d to_mue = mue - geometry.ap_position;
      const double d_ap = to_mue.norm();
      const double d_due = (geometry.due_position - mue).norm();

      const double phi = std::asin(to_mue.z() / d_ap);
      const double psi = std::atan2(to_mue.y(), to_mue.x());
      const Eigen::VectorXcd steering = array_response(phi, psi, config.n_vertical, config.n_horizontal);
      out.h_unmasked[t][k] = scale * std::sqrt(chi0 * std::pow(d_ap, -eta)) * steering;

      const double theta = std::fmod(2.0 * std::numbers::pi * d_due / lambda, 2.0 * std::numbers::pi);
      out.g_unmasked[t][k] =
          scale * std::sqrt(chi0 * std::pow(d_due, -eta)) * std::exp(1i * theta);

      const double p_ap = config.blockage_mode == BlockageMode::kIndependent
                              ? config.blockage_p
                              : 0.5 * d_ap / d_max;
      const double p_due = config.blockage_mode == BlockageMode::kIndependent
                               ? config.blockage_p
                               : 0.5 * d_due / d_max;
      bool ap_link = unit(rng) >= p_ap;
      bool due_link = unit(rng) >= p_due;
      if (force_unblocked) ap_link = due_link = true;

      out.ap_mask[t][k] = ap_link ? 1 : 0;
      out.due_mask[t][k] = due_link ? 1 : 0;
      out.h[t][k] = ap_link ? out.h_unmasked[t][k] : Eigen::VectorXcd::Zero(config.n_antennas);
      out.g[t][k] = due_link ? out.g_unmasked[t][k] : 0.0;
      out.k_t[t] += ap_link;
      out.k_full_t[t] += ap_link && due_link;
    }
  }
  return out;
}

ChannelRealization sample_realization(const SystemConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Geometry geometry = sample_geometry(config, rng);
  return sample_channels(config, geometry, rng);
}

std::string to_string(BlockageMode mode) {
  return mode == BlockageMode::kIndependent ? "independent" : "distance_dependent";
}

BlockageMode blockage_mode_from_string(const std::string& name) {
  if (name == "independent") return BlockageMode::kIndependent;
  if (name == "distance_dependent") return BlockageMode::kDistanceDependent;
  throw DimensionError("unknown blockage mode: " + name);
}

namespace {

nlohmann::json vec3_to_json(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw DimensionError("expected a 3-element position");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string config_to_json(const SystemConfig& c) {
  nlohmann::json j;
  j["n_antennas"] = c.n_antennas;
  j["n_vertical"] = c.n_vertical;
  j["n_horizontal"] = c.n_horizontal;
  j["n_mues"] = c.n_mues;
  j["n_blocks"] = c.n_blocks;
  j["blockage_p"] = c.blockage_p;
  j["blockage_mode"] = to_string(c.blockage_mode);
  j["carrier_freq_hz"] = c.carrier_freq_hz;
  j["block_duration_s"] = c.block_duration_s;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["pathloss_exp"] = c.pathloss_exp;
  j["ap_position"] = vec3_to_json(c.ap_position);
  j["due_position"] = vec3_to_json(c.due_position);
  j["mue_box"] = {vec3_to_json(c.mue_box_min), vec3_to_json(c.mue_box_max)};
  j["throughput_mue"] = c.throughput_mue;
  j["throughput_due"] = c.throughput_due;
  j["eco_s"] = c.eco_s;
  j["edt_buffer"] = c.edt_buffer;
  j["delta_calibration_trials"] = c.delta_calibration_trials;
  j["sca_epsilon"] = c.sca_epsilon;
  j["sca_max_iter"] = c.sca_max_iter;
  j["solver_accuracy"] = c.solver_accuracy;
  j["solver_max_iter"] = c.solver_max_iter;
  j["verify_tol"] = c.verify_tol;
  j["unblocked_final_block"] = c.unblocked_final_block;
  j["seed"] = c.seed;
  return j.dump(2);
}

SystemConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SystemConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
  };
  get("n_antennas", c.n_antennas);
  get("n_vertical", c.n_vertical);
  get("n_horizontal", c.n_horizontal);
  get("n_mues", c.n_mues);
  get("n_blocks", c.n_blocks);
  get("blockage_p", c.blockage_p);
  if (j.contains("blockage_mode"))
    c.blockage_mode = blockage_mode_from_string(j.at("blockage_mode").get<std::string>());
  get("carrier_freq_hz", c.carrier_freq_hz);
  get("block_duration_s", c.block_duration_s);
  get("bandwidth_hz", c.bandwidth_hz);
  get("pathloss_exp", c.pathloss_exp);
  if (j.contains("ap_position")) c.ap_position = vec3_from_json(j.at("ap_position"));
  if (j.contains("due_position")) c.due_position = vec3_from_json(j.at("due_position"));
  if (j.contains("mue_box")) {
    const auto& box = j.at("mue_box");
    if (!box.is_array() || box.size() != 2) throw DimensionError("mue_box needs two corners");
    c.mue_box_min = vec3_from_json(box[0]);
    c.mue_box_max = vec3_from_json(box[1]);
  }
  get("throughput_mue", c.throughput_mue);
  get("throughput_due", c.throughput_due);
  get("eco_s", c.eco_s);
  get("edt_buffer", c.edt_buffer);
  get("delta_calibration_trials", c.delta_calibration_trials);
  get("sca_epsilon", c.sca_epsilon);
  get("sca_max_iter", c.sca_max_iter);
  get("solver_accuracy", c.solver_accuracy);
  get("solver_max_iter", c.solver_max_iter);
  get("verify_tol", c.verify_tol);
  get("unblocked_final_block", c.unblocked_final_block);
  get("seed", c.seed);
  c.validate();
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DimensionError("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

void save_config(const SystemConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DimensionError("cannot write scenario file: " + path);
  out << config_to_json(config) << "\n";
}

}  // namespace crsopt
