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

#include "crsopt/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <tuple>
#include <utility>

#include "crsopt/errors.hpp"

// rust/clarabel_ffi: thin C bridge to the Clarabel interior-point solver.
extern "C" int32_t clarabel_ffi_solve(size_t n, const double* q, size_t m, size_t nnz,
                                      const size_t* colptr, const size_t* rowval,
                                      const double* nzval, const double* b, size_t n_cones,
                                      const int32_t* cone_tags, const size_t* cone_dims,
                                      double tol, uint32_t max_iter, int32_t verbose,
                                      double* x_out, double* obj_out, uint32_t* iters_out,
                                      double* residual_out);

namespace crsopt::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

void LinExpr::add_term(VarId v, double coef) {
  if (coef == 0.0) return;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == v) {
      coefs_[i] += coef;
      return;
    }
  }
  vars_.push_back(v);
  coefs_.push_back(coef);
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  constant_ += other.constant_;
  for (std::size_t i = 0; i < other.vars_.size(); ++i) add_term(other.vars_[i], other.coefs_[i]);
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  constant_ -= other.constant_;
  for (std::size_t i = 0; i < other.vars_.size(); ++i) add_term(other.vars_[i], -other.coefs_[i]);
  return *this;
}

LinExpr& LinExpr::operator*=(double scale) {
  constant_ *= scale;
  for (double& c : coefs_) c *= scale;
  return *this;
}

double LinExpr::evaluate(std::span<const double> x) const {
  double value = constant_;
  for (std::size_t i = 0; i < vars_.size(); ++i) value += coefs_[i] * x[vars_[i]];
  return value;
}

VarId ConicProgram::add_variable(const std::string& name) {
  names_.push_back(name);
  return static_cast<VarId>(names_.size()) - 1;
}

std::vector<VarId> ConicProgram::add_variables(const std::string& prefix, int count) {
  std::vector<VarId> ids(count);
  for (int i = 0; i < count; ++i) ids[i] = add_variable(prefix + "[" + std::to_string(i) + "]");
  return ids;
}

void ConicProgram::check_expr(const LinExpr& expr) const {
  for (VarId v : expr.vars()) {
    if (v < 0 || v >= num_variables())
      throw DimensionError("expression references an unregistered variable");
  }
}

int ConicProgram::add_constraint(ConeTag tag, std::vector<LinExpr> rows) {
  if (tag == ConeTag::kExp && rows.size() != 3)
    throw DimensionError("exponential cone blocks must have dimension 3");
  if (tag == ConeTag::kSoc && rows.empty())
    throw DimensionError("second-order cone blocks need at least one row");
  if (tag == ConeTag::kRsoc && rows.size() < 2)
    throw DimensionError("rotated cone blocks need at least two rows");
  for (const LinExpr& row : rows) check_expr(row);
  blocks_.push_back(Block{tag, std::move(rows)});
  return static_cast<int>(blocks_.size()) - 1;
}

int ConicProgram::add_equality(LinExpr expr) {
  return add_constraint(ConeTag::kZero, {std::move(expr)});
}

int ConicProgram::add_nonneg(LinExpr expr) {
  return add_constraint(ConeTag::kNonneg, {std::move(expr)});
}

int ConicProgram::add_quadratic_epigraph(std::span<const LinExpr> vec, LinExpr bound) {
  std::vector<LinExpr> rows;
  rows.reserve(vec.size() + 2);
  rows.push_back(std::move(bound));
  rows.push_back(LinExpr(0.5));
  for (const LinExpr& e : vec) rows.push_back(e);
  return add_constraint(ConeTag::kRsoc, std::move(rows));
}

int ConicProgram::add_exp_rate_constraint(LinExpr rate, LinExpr rhs) {
  // 2^rate - 1 <= rhs  <=>  (rate*ln2, 1, 1 + rhs) in Kexp
  std::vector<LinExpr> rows(3);
  rows[0] = rate * std::numbers::ln2;
  rows[1] = LinExpr(1.0);
  rows[2] = rhs + LinExpr(1.0);
  return add_constraint(ConeTag::kExp, std::move(rows));
}

namespace {

// Row of the lowered problem: rotated cones synthesize new expressions,
// everything else borrows the block's row.
struct LoweredRow {
  const LinExpr* expr = nullptr;
  LinExpr owned;
  const LinExpr& get() const { return expr ? *expr : owned; }
};

}  // namespace

SolveOutcome ConicProgram::solve(const SolveOptions& options) const {
  // Lower blocks to Clarabel's cone set (zero/nonneg/soc/exp); rotated
  // cones (u, v, w) map to soc rows (u+v, u-v, sqrt(2) w).
  std::vector<LoweredRow> rows;
  std::vector<int32_t> tags;
  std::vector<std::size_t> dims;
  for (const Block& block : blocks_) {
    switch (block.tag) {
      case ConeTag::kZero:
      case ConeTag::kNonneg:
        tags.push_back(block.tag == ConeTag::kZero ? 0 : 1);
        dims.push_back(block.rows.size());
        for (const LinExpr& e : block.rows) rows.push_back({&e, {}});
        break;
      case ConeTag::kSoc:
        tags.push_back(2);
        dims.push_back(block.rows.size());
        for (const LinExpr& e : block.rows) rows.push_back({&e, {}});
        break;
      case ConeTag::kExp:
        tags.push_back(3);
        dims.push_back(3);
        for (const LinExpr& e : block.rows) rows.push_back({&e, {}});
        break;
      case ConeTag::kRsoc: {
        tags.push_back(2);
        dims.push_back(block.rows.size());
        LoweredRow sum, diff;
        sum.owned = block.rows[0] + block.rows[1];
        diff.owned = block.rows[0] - block.rows[1];
        rows.push_back(std::move(sum));
        rows.push_back(std::move(diff));
        for (std::size_t i = 2; i < block.rows.size(); ++i) {
          LoweredRow r;
          r.owned = block.rows[i] * kSqrt2;
          rows.push_back(std::move(r));
        }
        break;
      }
    }
  }

  const std::size_t n = static_cast<std::size_t>(num_variables());
  const std::size_t m = rows.size();

  // Triplets (col, row, -coef); b holds the row constants.
  std::vector<double> b(m);
  std::vector<std::tuple<std::size_t, std::size_t, double>> triplets;
  for (std::size_t i = 0; i < m; ++i) {
    const LinExpr& e = rows[i].get();
    b[i] = e.constant();
    for (std::size_t j = 0; j < e.vars().size(); ++j)
      triplets.emplace_back(static_cast<std::size_t>(e.vars()[j]), i, -e.coefs()[j]);
  }
  std::sort(triplets.begin(), triplets.end());

  std::vector<std::size_t> colptr(n + 1, 0), rowval;
  std::vector<double> nzval;
  rowval.reserve(triplets.size());
  nzval.reserve(triplets.size());
  for (std::size_t idx = 0; idx < triplets.size();) {
    const auto [col, row, val] = triplets[idx];
    double merged = val;
    std::size_t next = idx + 1;
    while (next < triplets.size() && std::get<0>(triplets[next]) == col &&
           std::get<1>(triplets[next]) == row) {
      merged += std::get<2>(triplets[next]);
      ++next;
    }
    rowval.push_back(row);
    nzval.push_back(merged);
    colptr[col + 1] = rowval.size();
    idx = next;
  }
  for (std::size_t c = 1; c <= n; ++c) colptr[c] = std::max(colptr[c], colptr[c - 1]);

  std::vector<double> q(n, 0.0);
  for (std::size_t j = 0; j < objective_.vars().size(); ++j)
    q[objective_.vars()[j]] += objective_.coefs()[j];

  static const double dummy_d = 0.0;
  static const std::size_t dummy_s = 0;
  std::vector<double> x(n, 0.0);
  double obj = 0.0, residual = 0.0;
  uint32_t iterations = 0;
  const int32_t rc = clarabel_ffi_solve(
      n, q.empty() ? &dummy_d : q.data(), m, nzval.size(), colptr.data(),
      rowval.empty() ? &dummy_s : rowval.data(), nzval.empty() ? &dummy_d : nzval.data(),
      b.empty() ? &dummy_d : b.data(), tags.size(), tags.empty() ? nullptr : tags.data(),
      dims.empty() ? nullptr : dims.data(), options.accuracy,
      static_cast<uint32_t>(options.max_iterations), options.verbose ? 1 : 0, x.data(), &obj,
      &iterations, &residual);

  SolveOutcome outcome;
  outcome.iterations = static_cast<int>(iterations);
  outcome.max_residual = residual;
  outcome.objective = obj + objective_.constant();
  switch (rc) {
    case 0:
      outcome.status = SolveStatus::kOptimal;
      outcome.primal = std::move(x);
      break;
    case 1:
      outcome.status = SolveStatus::kInfeasible;
      break;
    case 2:
      outcome.status = SolveStatus::kUnbounded;
      break;
    default:
      outcome.status = SolveStatus::kNumericalLimit;
      break;
  }
  return outcome;
}

double ConicProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  auto bump = [&worst](double v) { worst = std::max(worst, v); };
  for (const Block& block : blocks_) {
    std::vector<double> v(block.rows.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = block.rows[i].evaluate(x);
    switch (block.tag) {
      case ConeTag::kZero:
        for (double value : v) bump(std::abs(value));
        break;
      case ConeTag::kNonneg:
        for (double value : v) bump(-value);
        break;
      case ConeTag::kSoc: {
        double norm = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) norm += v[i] * v[i];
        bump(std::sqrt(norm) - v[0]);
        break;
      }
      case ConeTag::kRsoc: {
        double norm2 = 0.0;
        for (std::size_t i = 2; i < v.size(); ++i) norm2 += v[i] * v[i];
        bump(norm2 - 2.0 * v[0] * v[1]);
        bump(-v[0]);
        bump(-v[1]);
        break;
      }
      case ConeTag::kExp: {
        if (v[1] > 0.0) {
          bump(v[1] * std::exp(v[0] / v[1]) - v[2]);
        } else {
          // closure of the cone: y = 0 requires x <= 0, z >= 0
          bump(-v[1]);
          bump(v[0]);
          bump(-v[2]);
        }
        break;
      }
    }
  }
  return worst;
}

void ConicProgram::write_cbf(std::ostream& out) const {
  out << "VER\n3\n\n";
  out << "OBJSENSE\nMIN\n\n";
  out << "VAR\n" << num_variables() << " 1\nF " << num_variables() << "\n\n";

  std::size_t total_rows = 0;
  for (const Block& b : blocks_) total_rows += b.rows.size();
  out << "CON\n" << total_rows << " " << blocks_.size() << "\n";
  for (const Block& b : blocks_) {
    switch (b.tag) {
      case ConeTag::kZero: out << "L= " << b.rows.size() << "\n"; break;
      case ConeTag::kNonneg: out << "L+ " << b.rows.size() << "\n"; break;
      case ConeTag::kSoc: out << "Q " << b.rows.size() << "\n"; break;
      case ConeTag::kRsoc: out << "QR " << b.rows.size() << "\n"; break;
      case ConeTag::kExp: out << "EXP 3\n"; break;
    }
  }
  out << "\n";

  std::size_t obj_nnz = objective_.vars().size();
  if (obj_nnz > 0) {
    out << "OBJACOORD\n" << obj_nnz << "\n";
    for (std::size_t j = 0; j < obj_nnz; ++j)
      out << objective_.vars()[j] << " " << objective_.coefs()[j] << "\n";
    out << "\n";
  }
  if (objective_.constant() != 0.0) out << "OBJBCOORD\n" << objective_.constant() << "\n\n";

  // CBF's EXP cone is ordered (z, y, x) relative to ours.
  std::vector<const LinExpr*> ordered;
  ordered.reserve(total_rows);
  for (const Block& b : blocks_) {
    if (b.tag == ConeTag::kExp) {
      ordered.push_back(&b.rows[2]);
      ordered.push_back(&b.rows[1]);
      ordered.push_back(&b.rows[0]);
    } else {
      for (const LinExpr& e : b.rows) ordered.push_back(&e);
    }
  }

  std::size_t a_nnz = 0, b_nnz = 0;
  for (const LinExpr* e : ordered) {
    a_nnz += e->vars().size();
    b_nnz += e->constant() != 0.0;
  }
  out << "ACOORD\n" << a_nnz << "\n";
  for (std::size_t i = 0; i < ordered.size(); ++i)
    for (std::size_t j = 0; j < ordered[i]->vars().size(); ++j)
      out << i << " " << ordered[i]->vars()[j] << " " << ordered[i]->coefs()[j] << "\n";
  out << "\n";
  out << "BCOORD\n" << b_nnz << "\n";
  for (std::size_t i = 0; i < ordered.size(); ++i)
    if (ordered[i]->constant() != 0.0) out << i << " " << ordered[i]->constant() << "\n";
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalLimit: return "numerical_limit";
  }
  return "unknown";
}

}  // namespace crsopt::conic
