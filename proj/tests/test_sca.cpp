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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crsopt/errors.hpp"
#include "crsopt/sca.hpp"
#include "support.hpp"

using namespace crsopt;

TEST_CASE("taylor_qol is exact at the expansion point") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> gamma_dist(0.1, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXcd h = testing::random_cvec(4, rng);
    const Eigen::VectorXcd f = testing::random_cvec(4, rng);
    const double gamma = gamma_dist(rng);
    const QolLinearization lin = taylor_qol(h, f, gamma);
    const double exact = std::norm(h.dot(f)) / gamma;
    CHECK(lin.evaluate(f, gamma) ==
          doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("taylor_qol hand-evaluated scalar case") {
  Eigen::VectorXcd h(1), f_local(1);
  h(0) = 1.0;
  f_local(0) = 2.0;
  const QolLinearization lin = taylor_qol(h, f_local, 4.0);
  // coefficients: f (re part) -> 2*Re(u)/gamma = 1; gamma -> -|u|^2/gamma^2 = -1/4
  CHECK(lin.f_coefs(0) == doctest::Approx(1.0));
  CHECK(lin.f_coefs(1) == doctest::Approx(0.0));
  CHECK(lin.gamma_coef == doctest::Approx(-0.25));
  CHECK(lin.evaluate(f_local, 4.0) == doctest::Approx(1.0));  // = |h^H f|^2/gamma = 4/4
}

TEST_CASE("taylor_qol vanishes at a zero expansion point") {
  Eigen::VectorXcd h(3), f_local = Eigen::VectorXcd::Zero(3);
  h << 1.0, 2.0, std::complex<double>(0, 1);
  const QolLinearization lin = taylor_qol(h, f_local, 2.0);
  CHECK(lin.f_coefs.norm() == 0.0);
  CHECK(lin.gamma_coef == 0.0);
}

TEST_CASE("taylor_qol never overestimates the quadratic-over-linear term") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> gamma_dist(0.05, 20.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXcd h = testing::random_cvec(3, rng);
    const Eigen::VectorXcd f_local = testing::random_cvec(3, rng);
    const double gamma_local = gamma_dist(rng);
    const QolLinearization lin = taylor_qol(h, f_local, gamma_local);
    const Eigen::VectorXcd f = testing::random_cvec(3, rng);
    const double gamma = gamma_dist(rng);
    const double surrogate = lin.evaluate(f, gamma);
    const double exact = std::norm(h.dot(f)) / gamma;
    CHECK(surrogate <= exact + 1e-9);
  }
}

TEST_CASE("taylor_qol rejects nonpositive gamma") {
  Eigen::VectorXcd h(1), f(1);
  h(0) = f(0) = 1.0;
  CHECK_THROWS_AS(taylor_qol(h, f, 0.0), std::domain_error);
  CHECK_THROWS_AS(taylor_qol(h, f, -1.0), std::domain_error);
}

TEST_CASE("sca_drive: exact surrogate converges immediately") {
  int calls = 0;
  const ScaStepFn step = [&calls](const LocalPoint& point, int) {
    ++calls;
    ScaStep result;
    result.status = conic::SolveStatus::kOptimal;
    result.objective = 5.0;
    result.next = point;
    return result;
  };
  LocalPoint point;
  const ScaTrace trace = sca_drive(step, point, {1e-3, 50, false});
  CHECK(trace.termination == ScaTermination::kConverged);
  CHECK(calls <= 2);
}

TEST_CASE("sca_drive: infeasible first surrogate raises InitializationError") {
  const ScaStepFn step = [](const LocalPoint&, int) {
    ScaStep result;
    result.status = conic::SolveStatus::kInfeasible;
    return result;
  };
  LocalPoint point;
  CHECK_THROWS_AS(sca_drive(step, point, {}), InitializationError);
}

TEST_CASE("sca_drive: later solver failures keep the best-so-far point") {
  const ScaStepFn step = [](const LocalPoint& point, int iteration) {
    ScaStep result;
    if (iteration >= 2) {
      result.status = conic::SolveStatus::kNumericalLimit;
      return result;
    }
    result.status = conic::SolveStatus::kOptimal;
    result.objective = 10.0 - iteration;
    result.next = point;
    return result;
  };
  LocalPoint point;
  const ScaTrace trace = sca_drive(step, point, {1e-9, 50, false});
  CHECK(trace.termination == ScaTermination::kSolverLimit);
  CHECK(trace.iterations() == 2);
  CHECK(trace.objective.back() == doctest::Approx(9.0));
}

TEST_CASE("sca_drive stops at max_iter") {
  const ScaStepFn step = [](const LocalPoint& point, int iteration) {
    ScaStep result;
    result.status = conic::SolveStatus::kOptimal;
    result.objective = 100.0 / (iteration + 1);  // keeps changing
    result.next = point;
    return result;
  };
  LocalPoint point;
  const ScaTrace trace = sca_drive(step, point, {1e-12, 7, false});
  CHECK(trace.termination == ScaTermination::kMaxIterations);
  CHECK(trace.iterations() == 7);
}

TEST_CASE("trace csv export") {
  ScaTrace trace;
  trace.objective = {3.0, 2.5};
  trace.max_residual = {1e-8, 2e-9};
  std::ostringstream out;
  trace.write_csv(out);
  CHECK(out.str() == "iteration,objective,max_residual\n0,3,1e-08\n1,2.5,2e-09\n");
}
