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

#include "crsopt/sca.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "crsopt/errors.hpp"
#include "crsopt/lift.hpp"

namespace crsopt {

double QolLinearization::evaluate(const Eigen::VectorXcd& f, double gamma) const {
  return f_coefs.dot(lift_vector(f)) + gamma_coef * gamma;
}

QolLinearization taylor_qol(const Eigen::VectorXcd& h, const Eigen::VectorXcd& f_local,
                            double gamma_local) {
  if (gamma_local <= 0.0) throw std::domain_error("taylor_qol requires gamma_local > 0");
  if (h.size() != f_local.size())
    throw DimensionError("taylor_qol: channel and precoder dimensions differ");

  const std::complex<double> u = h.dot(f_local);  // h^H f_local
  QolLinearization lin;
  // 2 Re{f_local^H h h^H f} / gamma_local, as coefficients over [Re f; Im f].
  lin.f_coefs = (2.0 / gamma_local) *
                (u.real() * lift_inner_re(h) + u.imag() * lift_inner_im(h));
  lin.gamma_coef = -std::norm(u) / (gamma_local * gamma_local);
  return lin;
}

ScaTrace sca_drive(const ScaStepFn& step, LocalPoint& point, const ScaOptions& options) {
  ScaTrace trace;
  trace.maximize = options.maximize;
  double previous = 0.0;
  for (int iteration = 0; iteration < options.max_iter; ++iteration) {
    ScaStep result = step(point, iteration);
    if (result.status != conic::SolveStatus::kOptimal) {
      if (iteration == 0)
        throw InitializationError("first SCA surrogate not solvable: " +
                                  conic::to_string(result.status));
      trace.termination = ScaTermination::kSolverLimit;
      return trace;  // keep the best-so-far point
    }
    point = std::move(result.next);
    trace.objective.push_back(result.objective);
    trace.max_residual.push_back(result.max_residual);
    if (iteration > 0) {
      const double change =
          std::abs(result.objective - previous) / std::max(1e-12, std::abs(previous));
      if (change < options.epsilon) {
        trace.termination = ScaTermination::kConverged;
        return trace;
      }
    }
    previous = result.objective;
  }
  trace.termination = ScaTermination::kMaxIterations;
  return trace;
}

void ScaTrace::write_csv(std::ostream& out) const {
  out << "iteration,objective,max_residual\n";
  for (std::size_t i = 0; i < objective.size(); ++i)
    out << i << "," << objective[i] << "," << max_residual[i] << "\n";
}

std::string to_string(ScaTermination termination) {
  switch (termination) {
    case ScaTermination::kConverged: return "converged";
    case ScaTermination::kMaxIterations: return "max_iterations";
    case ScaTermination::kSolverLimit: return "solver_limit";
  }
  return "unknown";
}

}  // namespace crsopt
