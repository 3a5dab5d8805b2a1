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

#ifndef CRSOPT_CONIC_HPP
#define CRSOPT_CONIC_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crsopt::conic {

using VarId = int;

// Sparse affine expression over program variables.
class LinExpr {
 public:
  LinExpr() = default;
  /* implicit */ LinExpr(double constant) : constant_(constant) {}

  static LinExpr variable(VarId v, double coef = 1.0) {
    LinExpr e;
    e.add_term(v, coef);
    return e;
  }

  void add_term(VarId v, double coef);
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double scale);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  const std::vector<VarId>& vars() const { return vars_; }
  const std::vector<double>& coefs() const { return coefs_; }
  double evaluate(std::span<const double> x) const;

 private:
  std::vector<VarId> vars_;
  std::vector<double> coefs_;
  double constant_ = 0.0;
};

// Cone membership of a constraint block, applied to the block's affine
// rows evaluated at the variable vector:
//   kZero     rows == 0
//   kNonneg   rows >= 0
//   kSoc      rows[0] >= ||rows[1:]||
//   kRsoc     2*rows[0]*rows[1] >= ||rows[2:]||^2, rows[0], rows[1] >= 0
//   kExp      rows[1] > 0 and rows[1]*exp(rows[0]/rows[1]) <= rows[2]
enum class ConeTag { kZero, kNonneg, kSoc, kRsoc, kExp };

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalLimit };

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNumericalLimit;
  std::vector<double> primal;  // present iff status == kOptimal
  double objective = 0.0;
  int iterations = 0;
  double max_residual = 0.0;
};

struct SolveOptions {
  double accuracy = 1e-7;
  int max_iterations = 200;
  bool verbose = false;
};

// Canonical cone program: minimize a linear objective subject to affine
// maps landing in zero / nonnegative / second-order / rotated-second-order
// / exponential cones. Complex model quantities must be lifted to
// real/imaginary coordinate pairs before entering the program.
class ConicProgram {
 public:
  VarId add_variable(const std::string& name);
  std::vector<VarId> add_variables(const std::string& prefix, int count);
  int num_variables() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(VarId v) const { return names_.at(v); }

  void set_objective(LinExpr objective) { objective_ = std::move(objective); }
  const LinExpr& objective() const { return objective_; }

  // Generic block: the rows must all reference registered variables.
  // Returns the constraint id.
  int add_constraint(ConeTag tag, std::vector<LinExpr> rows);

  int add_equality(LinExpr expr);  // expr == 0
  int add_nonneg(LinExpr expr);    // expr >= 0
  // ||vec||^2 <= bound (rotated-SOC encoding with the second leg pinned to 1/2).
  int add_quadratic_epigraph(std::span<const LinExpr> vec, LinExpr bound);
  // 2^rate - 1 <= rhs via one exponential-cone block.
  int add_exp_rate_constraint(LinExpr rate, LinExpr rhs);

  int num_constraints() const { return static_cast<int>(blocks_.size()); }

  SolveOutcome solve(const SolveOptions& options = {}) const;

  // Largest cone violation of a candidate point; 0 means feasible.
  double max_violation(std::span<const double> x) const;
  double eval_objective(std::span<const double> x) const { return objective_.evaluate(x); }

  // Conic Benchmark Format dump for cross-solver debugging.
  void write_cbf(std::ostream& out) const;

 private:
  struct Block {
    ConeTag tag;
    std::vector<LinExpr> rows;
  };
  void check_expr(const LinExpr& expr) const;

  std::vector<std::string> names_;
  std::vector<Block> blocks_;
  LinExpr objective_;
};

std::string to_string(SolveStatus status);

}  // namespace crsopt::conic

#endif  // CRSOPT_CONIC_HPP
