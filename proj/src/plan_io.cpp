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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crsopt/errors.hpp"
#include "crsopt/rate_model.hpp"

namespace crsopt {

namespace {

using nlohmann::json;

json complex_to_json(const std::complex<double>& z) { return {z.real(), z.imag()}; }

std::complex<double> complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json cvec_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Eigen::VectorXcd cvec_from_json(const json& j) {
  Eigen::VectorXcd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j.at(i));
  return v;
}

Framework framework_from_string(const std::string& name) {
  if (name == "idecrs") return Framework::kIdecrs;
  if (name == "crs") return Framework::kCrs;
  if (name == "decrs") return Framework::kDecrs;
  throw DimensionError("unknown framework: " + name);
}

}  // namespace

std::string plan_to_json(const TransmitPlan& plan) {
  json j;
  j["framework"] = to_string(plan.framework);
  j["channel_scale"] = plan.channel_scale;
  j["blocks"] = json::array();
  for (const BlockPlan& block : plan.blocks) {
    json b;
    b["active"] = block.active;
    b["relaying"] = block.relaying;
    b["common"] = cvec_to_json(block.common);
    json layer1 = json::array(), privates = json::array(), relay = json::array();
    for (const auto& f : block.layer1) layer1.push_back(cvec_to_json(f));
    for (const auto& f : block.privates) privates.push_back(cvec_to_json(f));
    for (const auto& f : block.relay) relay.push_back(complex_to_json(f));
    b["layer1"] = layer1;
    b["privates"] = privates;
    b["relay"] = relay;
    b["alpha_c"] = block.alpha_c;
    b["alpha_p"] = block.alpha_p;
    b["beta_c"] = block.beta_c;
    b["beta_p"] = block.beta_p;
    b["mu"] = block.mu;
    b["crs_due_content"] = block.crs_due_content;
    b["rate_common"] = block.rate_common;
    b["rate_private"] = block.rate_private;
    b["rate_relay"] = block.rate_relay;
    b["gamma_c"] = block.gamma_c;
    b["gamma_p"] = block.gamma_p;
    b["gamma_d"] = block.gamma_d;
    j["blocks"].push_back(std::move(b));
  }
  return j.dump(2);
}

TransmitPlan plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  TransmitPlan plan;
  plan.framework = framework_from_string(j.at("framework").get<std::string>());
  plan.channel_scale = j.at("channel_scale").get<double>();
  for (const json& b : j.at("blocks")) {
    BlockPlan block;
    block.active = b.at("active").get<std::vector<int>>();
    block.relaying = b.at("relaying").get<std::vector<int>>();
    block.common = cvec_from_json(b.at("common"));
    for (const json& f : b.at("layer1")) block.layer1.push_back(cvec_from_json(f));
    for (const json& f : b.at("privates")) block.privates.push_back(cvec_from_json(f));
    for (const json& f : b.at("relay")) block.relay.push_back(complex_from_json(f));
    block.alpha_c = b.at("alpha_c").get<std::vector<double>>();
    block.alpha_p = b.at("alpha_p").get<std::vector<double>>();
    block.beta_c = b.at("beta_c").get<std::vector<double>>();
    block.beta_p = b.at("beta_p").get<std::vector<double>>();
    block.mu = b.at("mu").get<std::vector<double>>();
    block.crs_due_content = b.at("crs_due_content").get<double>();
    block.rate_common = b.at("rate_common").get<std::vector<double>>();
    block.rate_private = b.at("rate_private").get<std::vector<double>>();
    block.rate_relay = b.at("rate_relay").get<std::vector<double>>();
    block.gamma_c = b.at("gamma_c").get<std::vector<double>>();
    block.gamma_p = b.at("gamma_p").get<std::vector<double>>();
    block.gamma_d = b.at("gamma_d").get<std::vector<double>>();
    plan.blocks.push_back(std::move(block));
  }
  return plan;
}

void save_plan(const TransmitPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DimensionError("cannot write plan file: " + path);
  out << plan_to_json(plan) << "\n";
}

TransmitPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DimensionError("cannot open plan file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return plan_from_json(buffer.str());
}

}  // namespace crsopt
