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

#ifndef CRSOPT_SCA_HPP
#define CRSOPT_SCA_HPP

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crsopt/conic.hpp"

namespace crsopt {

// Expansion point for the successive convex approximation: precoder and
// relay-gain values plus the interference slack values gamma (>= 1).
struct LocalPoint {
  struct Block {
    Eigen::VectorXcd common;                   // size 0 when the block has no common stream
    std::vector<Eigen::VectorXcd> layer1;      // DeCRS only
    std::vector<Eigen::VectorXcd> privates;
    std::vector<std::complex<double>> relay;
    std::vector<double> gamma_c, gamma_p, gamma_d;
  };
  std::vector<Block> blocks;
};

// Affine under-estimator of the quadratic-over-linear term |h^H f|^2/gamma
// around (f_local, gamma_local):
//   value(f, gamma) = f_coefs . lift_vector(f) + gamma_coef * gamma.
// Exact at the expansion point; never above the true term elsewhere.
struct QolLinearization {
  Eigen::VectorXd f_coefs;
  double gamma_coef = 0.0;

  double evaluate(const Eigen::VectorXcd& f, double gamma) const;
};

// Throws std::domain_error when gamma_local <= 0.
QolLinearization taylor_qol(const Eigen::VectorXcd& h, const Eigen::VectorXcd& f_local,
                            double gamma_local);

enum class ScaTermination { kConverged, kMaxIterations, kSolverLimit };

struct ScaTrace {
  std::vector<double> objective;     // one entry per completed iteration
  std::vector<double> max_residual;  // solver residual per iteration
  ScaTermination termination = ScaTermination::kMaxIterations;
  bool maximize = false;

  int iterations() const { return static_cast<int>(objective.size()); }
  void write_csv(std::ostream& out) const;
};

struct ScaOptions {
  double epsilon = 1e-3;  // relative objective change threshold
  int max_iter = 50;
  bool maximize = false;
};

// One surrogate build+solve at the given local point. On success the
// callback returns the achieved objective and the refreshed local point
// (precoders from the solution, gammas recomputed as realized
// interference-plus-noise).
struct ScaStep {
  conic::SolveStatus status = conic::SolveStatus::kNumericalLimit;
  double objective = 0.0;
  double max_residual = 0.0;
  LocalPoint next;
};
using ScaStepFn = std::function<ScaStep(const LocalPoint&, int iteration)>;

// Iterates step() until the relative objective change drops below epsilon
// or max_iter is hit. `point` is updated in place with the last successful
// iterate. Throws InitializationError if the very first surrogate is
// infeasible; later solver failures terminate with kSolverLimit and the
// best-so-far point.
ScaTrace sca_drive(const ScaStepFn& step, LocalPoint& point, const ScaOptions& options);

std::string to_string(ScaTermination termination);

}  // namespace crsopt

#endif  // CRSOPT_SCA_HPP
