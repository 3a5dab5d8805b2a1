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

#include "surrogate.hpp"

#include <cmath>
#include <complex>

#include "crsopt/errors.hpp"
#include "crsopt/lift.hpp"

namespace crsopt::detail {

namespace {

using conic::ConicProgram;
using conic::LinExpr;
using conic::VarId;

// Re(h^H f) and Im(h^H f) over a lifted coordinate block.
std::pair<LinExpr, LinExpr> inner_pair(const Eigen::VectorXcd& h,
                                       const std::vector<VarId>& vars) {
  const Eigen::VectorXd re = lift_inner_re(h);
  const Eigen::VectorXd im = lift_inner_im(h);
  LinExpr e_re, e_im;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    e_re.add_term(vars[j], re[static_cast<Eigen::Index>(j)]);
    e_im.add_term(vars[j], im[static_cast<Eigen::Index>(j)]);
  }
  return {std::move(e_re), std::move(e_im)};
}

LinExpr qol_expr(const QolLinearization& lin, const std::vector<VarId>& f_vars,
                 VarId gamma_var) {
  LinExpr e;
  for (std::size_t j = 0; j < f_vars.size(); ++j)
    e.add_term(f_vars[j], lin.f_coefs[static_cast<Eigen::Index>(j)]);
  e.add_term(gamma_var, lin.gamma_coef);
  return e;
}

Eigen::VectorXcd scalar_channel(const std::complex<double>& g) {
  Eigen::VectorXcd h(1);
  h(0) = std::conj(g);  // so that h^H f = g * f
  return h;
}

Eigen::VectorXcd scalar_local(const std::complex<double>& f) {
  Eigen::VectorXcd v(1);
  v(0) = f;
  return v;
}

// 2^rate - 1 <= |h^H f|^2 / gamma, linearized at the local point.
void add_sinr_rate(ConicProgram& program, const Eigen::VectorXcd& h,
                   const Eigen::VectorXcd& f_local, double gamma_local,
                   const std::vector<VarId>& f_vars, VarId gamma_var, VarId rate_var) {
  const QolLinearization lin = taylor_qol(h, f_local, gamma_local);
  program.add_exp_rate_constraint(LinExpr::variable(rate_var),
                                  qol_expr(lin, f_vars, gamma_var));
}

// sum of squared inner products (+1) <= gamma.
void add_interference_bound(ConicProgram& program,
                            const std::vector<std::pair<LinExpr, LinExpr>>& inners,
                            VarId gamma_var) {
  std::vector<LinExpr> vec;
  vec.reserve(2 * inners.size());
  for (const auto& [re, im] : inners) {
    vec.push_back(re);
    vec.push_back(im);
  }
  program.add_quadratic_epigraph(vec, LinExpr::variable(gamma_var) - LinExpr(1.0));
}

void append_unit_exprs(const std::vector<VarId>& vars, std::vector<LinExpr>* out) {
  for (VarId v : vars) out->push_back(LinExpr::variable(v));
}

Eigen::VectorXcd read_cvec(std::span<const double> x, const std::vector<VarId>& vars) {
  Eigen::VectorXd lifted(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) lifted[static_cast<Eigen::Index>(j)] = x[vars[j]];
  return unlift_vector(lifted);
}

std::vector<double> read_values(std::span<const double> x, const std::vector<VarId>& vars) {
  std::vector<double> out(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) out[j] = x[vars[j]];
  return out;
}

}  // namespace

BlockHandles build_block(ConicProgram& program, const BlockChannels& channels,
                         const LocalPoint::Block& local, const BlockBuildOptions& options,
                         const std::string& tag) {
  const int n = channels.k_t();
  const int r = channels.k_full();
  const int dim = 2 * channels.n_antennas;
  if (n < 1) throw DimensionError("build_block: block has no active mUE");

  BlockHandles handles;
  BlockVars& vars = handles.vars;
  const bool decrs = options.framework == Framework::kDecrs;
  const bool crs = options.framework == Framework::kCrs;
  const bool with_due = options.include_due && r > 0;
  handles.has_due = with_due;

  std::vector<LinExpr> power_terms;

  if (!decrs) {
    vars.common = program.add_variables(tag + ".fc", dim);
    append_unit_exprs(vars.common, &power_terms);
  }
  for (int i = 0; i < n; ++i) {
    if (decrs) {
      vars.layer1.push_back(program.add_variables(tag + ".f1_" + std::to_string(i), dim));
      append_unit_exprs(vars.layer1.back(), &power_terms);
    }
    vars.privates.push_back(program.add_variables(tag + ".fp_" + std::to_string(i), dim));
    append_unit_exprs(vars.privates.back(), &power_terms);
  }
  if (with_due) {
    for (int i = 0; i < r; ++i) {
      vars.relay_re.push_back(program.add_variable(tag + ".fd_re_" + std::to_string(i)));
      vars.relay_im.push_back(program.add_variable(tag + ".fd_im_" + std::to_string(i)));
      power_terms.push_back(LinExpr::variable(vars.relay_re.back()));
      power_terms.push_back(LinExpr::variable(vars.relay_im.back()));
    }
  }

  vars.alpha_c = program.add_variables(tag + ".alpha_c", n);
  vars.alpha_p = program.add_variables(tag + ".alpha_p", n);
  vars.rate_common = program.add_variables(tag + ".Rc", n);
  vars.rate_private = program.add_variables(tag + ".Rp", n);
  vars.gamma_c = program.add_variables(tag + ".gamma_c", n);
  vars.gamma_p = program.add_variables(tag + ".gamma_p", n);
  for (int i = 0; i < n; ++i) {
    program.add_nonneg(LinExpr::variable(vars.alpha_c[i]));
    program.add_nonneg(LinExpr::variable(vars.alpha_p[i]));
  }
  if (with_due && !crs) {
    vars.beta_c = program.add_variables(tag + ".beta_c", r);
    vars.mu = program.add_variables(tag + ".mu", r);
    vars.rate_relay = program.add_variables(tag + ".Rd2", r);
    vars.gamma_d = program.add_variables(tag + ".gamma_d", r);
    if (!decrs) vars.beta_p = program.add_variables(tag + ".beta_p", r);
    for (int i = 0; i < r; ++i) {
      program.add_nonneg(LinExpr::variable(vars.beta_c[i]));
      program.add_nonneg(LinExpr::variable(vars.mu[i]));
      if (!decrs) program.add_nonneg(LinExpr::variable(vars.beta_p[i]));
    }
  }
  if (crs && with_due) {
    vars.crs_content = program.add_variable(tag + ".due_content");
    program.add_nonneg(LinExpr::variable(vars.crs_content));
    vars.rate_relay = {program.add_variable(tag + ".Rrel")};
    vars.gamma_d = {program.add_variable(tag + ".gamma_rel")};
    program.add_nonneg(LinExpr::variable(vars.gamma_d[0]) - LinExpr(1.0));
  }
  vars.power = program.add_variable(tag + ".power_w");

  // Content of the shared common stream.
  LinExpr common_content;
  for (int i = 0; i < n; ++i) common_content += LinExpr::variable(vars.alpha_c[i]);
  if (!decrs && !crs && with_due)
    for (int i = 0; i < r; ++i) common_content += LinExpr::variable(vars.beta_c[i]);
  if (crs && with_due) common_content += LinExpr::variable(vars.crs_content);

  auto relay_index_of_active = [&](int i) {
    for (int j = 0; j < r; ++j)
      if (channels.relaying[j] == channels.active[i]) return j;
    return -1;
  };

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd& h = channels.h[i];
    const int ri = relay_index_of_active(i);

    if (decrs) {
      // Layer 1 carries the mUE part alpha_c and the relayed part beta_c; it
      // is decoded against every other stream. Layer 2 (the private) is
      // decoded after removing the own layer-1 stream only.
      LinExpr layer1_load = LinExpr::variable(vars.alpha_c[i]);
      if (with_due && ri >= 0) layer1_load += LinExpr::variable(vars.beta_c[ri]);
      program.add_nonneg(LinExpr::variable(vars.rate_common[i]) - layer1_load);
      program.add_nonneg(LinExpr::variable(vars.rate_private[i]) -
                         LinExpr::variable(vars.alpha_p[i]));

      add_sinr_rate(program, h, local.layer1[i], local.gamma_c[i], vars.layer1[i],
                    vars.gamma_c[i], vars.rate_common[i]);
      std::vector<std::pair<LinExpr, LinExpr>> inners1;
      for (int j = 0; j < n; ++j) {
        if (j != i) inners1.push_back(inner_pair(h, vars.layer1[j]));
        inners1.push_back(inner_pair(h, vars.privates[j]));
      }
      add_interference_bound(program, inners1, vars.gamma_c[i]);

      add_sinr_rate(program, h, local.privates[i], local.gamma_p[i], vars.privates[i],
                    vars.gamma_p[i], vars.rate_private[i]);
      std::vector<std::pair<LinExpr, LinExpr>> inners2;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        inners2.push_back(inner_pair(h, vars.layer1[j]));
        inners2.push_back(inner_pair(h, vars.privates[j]));
      }
      add_interference_bound(program, inners2, vars.gamma_p[i]);
    } else {
      // Common stream must be decodable by every active mUE before SIC.
      program.add_nonneg(LinExpr::variable(vars.rate_common[i]) - common_content);
      LinExpr private_load = LinExpr::variable(vars.alpha_p[i]);
      if (!crs && with_due && ri >= 0) private_load += LinExpr::variable(vars.beta_p[ri]);
      program.add_nonneg(LinExpr::variable(vars.rate_private[i]) - private_load);

      add_sinr_rate(program, h, local.common, local.gamma_c[i], vars.common, vars.gamma_c[i],
                    vars.rate_common[i]);
      std::vector<std::pair<LinExpr, LinExpr>> inners_c;
      for (int j = 0; j < n; ++j) inners_c.push_back(inner_pair(h, vars.privates[j]));
      add_interference_bound(program, inners_c, vars.gamma_c[i]);

      add_sinr_rate(program, h, local.privates[i], local.gamma_p[i], vars.privates[i],
                    vars.gamma_p[i], vars.rate_private[i]);
      std::vector<std::pair<LinExpr, LinExpr>> inners_p;
      for (int j = 0; j < n; ++j)
        if (j != i) inners_p.push_back(inner_pair(h, vars.privates[j]));
      add_interference_bound(program, inners_p, vars.gamma_p[i]);
    }
  }

  if (with_due && !crs) {
    for (int i = 0; i < r; ++i) {
      const Eigen::VectorXcd gh = scalar_channel(channels.g[i]);
      const std::vector<VarId> f_vars{vars.relay_re[i], vars.relay_im[i]};
      add_sinr_rate(program, gh, scalar_local(local.relay[i]), local.gamma_d[i], f_vars,
                    vars.gamma_d[i], vars.rate_relay[i]);
      std::vector<std::pair<LinExpr, LinExpr>> inners;
      for (int j = 0; j < r; ++j) {
        if (j == i) continue;
        inners.push_back(inner_pair(scalar_channel(channels.g[j]),
                                    {vars.relay_re[j], vars.relay_im[j]}));
      }
      add_interference_bound(program, inners, vars.gamma_d[i]);

      LinExpr beta_sum = LinExpr::variable(vars.beta_c[i]);
      if (!decrs) beta_sum += LinExpr::variable(vars.beta_p[i]);
      program.add_nonneg(beta_sum - LinExpr::variable(vars.mu[i]));
      program.add_nonneg(LinExpr::variable(vars.rate_relay[i]) -
                         LinExpr::variable(vars.mu[i]));
    }
  }
  if (with_due && crs) {
    // All relays retransmit the same codeword; the dUE combines coherently,
    // and must decode the entire common content.
    Eigen::VectorXcd gh(r);
    Eigen::VectorXcd f_local(r);
    std::vector<VarId> f_vars;
    for (int i = 0; i < r; ++i) gh(i) = std::conj(channels.g[i]);
    for (int i = 0; i < r; ++i) f_local(i) = local.relay[i];
    for (int i = 0; i < r; ++i) f_vars.push_back(vars.relay_re[i]);
    for (int i = 0; i < r; ++i) f_vars.push_back(vars.relay_im[i]);
    add_sinr_rate(program, gh, f_local, local.gamma_d[0], f_vars, vars.gamma_d[0],
                  vars.rate_relay[0]);
    program.add_nonneg(LinExpr::variable(vars.rate_relay[0]) - common_content);
  }

  program.add_quadratic_epigraph(power_terms, LinExpr::variable(vars.power));

  handles.power_w = LinExpr::variable(vars.power);
  for (int i = 0; i < n; ++i)
    handles.mue_rate.push_back(LinExpr::variable(vars.alpha_c[i]) +
                               LinExpr::variable(vars.alpha_p[i]));
  if (with_due) {
    if (crs) {
      handles.due_rate = LinExpr::variable(vars.crs_content);
    } else {
      for (int i = 0; i < r; ++i) handles.due_rate += LinExpr::variable(vars.mu[i]);
    }
  }
  return handles;
}

BlockPlan extract_block(const BlockVars& vars, const BlockChannels& channels,
                        std::span<const double> x, Framework framework) {
  BlockPlan block;
  block.active = channels.active;
  block.relaying = vars.relay_re.empty() ? std::vector<int>{} : channels.relaying;

  if (!vars.common.empty()) block.common = read_cvec(x, vars.common);
  for (const auto& ids : vars.layer1) block.layer1.push_back(read_cvec(x, ids));
  for (const auto& ids : vars.privates) block.privates.push_back(read_cvec(x, ids));
  for (std::size_t i = 0; i < vars.relay_re.size(); ++i)
    block.relay.emplace_back(x[vars.relay_re[i]], x[vars.relay_im[i]]);

  block.alpha_c = read_values(x, vars.alpha_c);
  block.alpha_p = read_values(x, vars.alpha_p);
  block.beta_c = read_values(x, vars.beta_c);
  block.beta_p = read_values(x, vars.beta_p);
  block.mu = read_values(x, vars.mu);
  if (framework == Framework::kDecrs) block.beta_p.assign(block.beta_c.size(), 0.0);
  if (vars.crs_content >= 0) block.crs_due_content = x[vars.crs_content];
  block.rate_common = read_values(x, vars.rate_common);
  block.rate_private = read_values(x, vars.rate_private);
  block.rate_relay = read_values(x, vars.rate_relay);
  block.gamma_c = read_values(x, vars.gamma_c);
  block.gamma_p = read_values(x, vars.gamma_p);
  block.gamma_d = read_values(x, vars.gamma_d);

  // Clip solver dust on the split variables.
  auto clip = [](std::vector<double>& v) {
    for (double& value : v) value = std::max(0.0, value);
  };
  clip(block.alpha_c);
  clip(block.alpha_p);
  clip(block.beta_c);
  clip(block.beta_p);
  clip(block.mu);
  block.crs_due_content = std::max(0.0, block.crs_due_content);
  return block;
}

LocalPoint::Block refresh_local(const BlockPlan& block, const BlockChannels& channels,
                                Framework framework) {
  const int n = static_cast<int>(channels.active.size());
  const int r = static_cast<int>(block.relay.size());
  LocalPoint::Block local;
  local.common = block.common;
  local.layer1 = block.layer1;
  local.privates = block.privates;
  local.relay = block.relay;
  local.gamma_c.resize(n);
  local.gamma_p.resize(n);

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd& h = channels.h[i];
    if (framework == Framework::kDecrs) {
      double all_other = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) all_other += std::norm(h.dot(block.layer1[j]));
        if (j != i) all_other += std::norm(h.dot(block.privates[j]));
      }
      local.gamma_c[i] = all_other + std::norm(h.dot(block.privates[i]));
      local.gamma_p[i] = all_other;
    } else {
      double privates_power = 1.0;
      for (int j = 0; j < n; ++j) privates_power += std::norm(h.dot(block.privates[j]));
      local.gamma_c[i] = privates_power;
      local.gamma_p[i] = privates_power - std::norm(h.dot(block.privates[i]));
    }
  }

  if (framework == Framework::kCrs) {
    if (r > 0) local.gamma_d = {1.0};  // coherent combining: no inter-relay interference
  } else {
    local.gamma_d.resize(r);
    for (int i = 0; i < r; ++i) {
      double interference = 1.0;
      for (int j = 0; j < r; ++j)
        if (j != i) interference += std::norm(channels.g[j] * block.relay[j]);
      local.gamma_d[i] = interference;
    }
  }
  return local;
}

double block_power_w(const BlockPlan& block) {
  double power = block.common.squaredNorm();
  for (const auto& f : block.layer1) power += f.squaredNorm();
  for (const auto& f : block.privates) power += f.squaredNorm();
  for (const auto& f : block.relay) power += std::norm(f);
  return power;
}

}  // namespace crsopt::detail
