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

#ifndef CRSOPT_SRC_SURROGATE_HPP
#define CRSOPT_SRC_SURROGATE_HPP

#include <span>
#include <string>
#include <vector>

#include "crsopt/algorithms.hpp"
#include "crsopt/conic.hpp"
#include "crsopt/rate_model.hpp"
#include "crsopt/sca.hpp"

namespace crsopt::detail {

// Variable ids of one block's surrogate. Precoder coordinate blocks are
// laid out [Re(0..N-1), Im(0..N-1)] to match the lifting convention.
struct BlockVars {
  std::vector<conic::VarId> common;                    // 2N, empty when absent
  std::vector<std::vector<conic::VarId>> layer1;       // DeCRS, [n][2N]
  std::vector<std::vector<conic::VarId>> privates;     // [n][2N]
  std::vector<conic::VarId> relay_re, relay_im;        // [r]
  std::vector<conic::VarId> alpha_c, alpha_p;          // [n]
  std::vector<conic::VarId> beta_c, beta_p, mu;        // [r]
  conic::VarId crs_content = -1;
  std::vector<conic::VarId> rate_common, rate_private; // [n]
  std::vector<conic::VarId> rate_relay;                // [r]; CRS: single entry
  std::vector<conic::VarId> gamma_c, gamma_p;          // [n]
  std::vector<conic::VarId> gamma_d;                   // [r]; CRS: single entry
  conic::VarId power = -1;                             // watts epigraph
};

// Affine handles the drivers attach objectives and cross-block rows to.
struct BlockHandles {
  BlockVars vars;
  conic::LinExpr power_w;
  std::vector<conic::LinExpr> mue_rate;  // per active entry
  conic::LinExpr due_rate;               // sum of mu, or the CRS content
  bool has_due = false;
};

struct BlockBuildOptions {
  Framework framework = Framework::kIdecrs;
  bool include_due = true;  // model relays / dUE content for this block
};

// Adds one block's variables and framework constraints at the given local
// point. `channels` must have at least one active mUE.
BlockHandles build_block(conic::ConicProgram& program, const BlockChannels& channels,
                         const LocalPoint::Block& local, const BlockBuildOptions& options,
                         const std::string& tag);

// Reads a primal solution back into a plan block.
BlockPlan extract_block(const BlockVars& vars, const BlockChannels& channels,
                        std::span<const double> x, Framework framework);

// Local point for the next iteration: solved precoders, gammas refreshed to
// the realized interference-plus-noise.
LocalPoint::Block refresh_local(const BlockPlan& block, const BlockChannels& channels,
                                Framework framework);

// Realized transmit power of a block plan (watts).
double block_power_w(const BlockPlan& block);

}  // namespace crsopt::detail

#endif  // CRSOPT_SRC_SURROGATE_HPP
