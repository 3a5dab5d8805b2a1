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

#include "crsopt/conic.hpp"
#include "crsopt/errors.hpp"
#include "crsopt/lift.hpp"
#include "support.hpp"

using namespace crsopt;
using conic::ConeTag;
using conic::ConicProgram;
using conic::LinExpr;
using conic::SolveStatus;

TEST_CASE("LP: min x subject to x >= 1") {
  ConicProgram program;
  const auto x = program.add_variable("x");
  program.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));
  program.set_objective(LinExpr::variable(x));
  const auto outcome = program.solve();
  REQUIRE(outcome.status == SolveStatus::kOptimal);
  CHECK(outcome.primal[x] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(outcome.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("SOC: min t subject to ||(3,4)|| <= t") {
  ConicProgram program;
  const auto t = program.add_variable("t");
  program.add_constraint(ConeTag::kSoc,
                         {LinExpr::variable(t), LinExpr(3.0), LinExpr(4.0)});
  program.set_objective(LinExpr::variable(t));
  const auto outcome = program.solve();
  REQUIRE(outcome.status == SolveStatus::kOptimal);
  CHECK(outcome.primal[t] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("exponential cone: min y subject to e^1 <= y") {
  ConicProgram program;
  const auto y = program.add_variable("y");
  program.add_constraint(ConeTag::kExp,
                         {LinExpr(1.0), LinExpr(1.0), LinExpr::variable(y)});
  program.set_objective(LinExpr::variable(y));
  const auto outcome = program.solve();
  REQUIRE(outcome.status == SolveStatus::kOptimal);
  CHECK(outcome.primal[y] == doctest::Approx(std::exp(1.0)).epsilon(1e-7));
}

TEST_CASE("quadratic epigraph") {
  SUBCASE("constant vector") {
    ConicProgram program;
    const auto t = program.add_variable("t");
    const std::vector<LinExpr> vec = {LinExpr(3.0), LinExpr(4.0)};
    program.add_quadratic_epigraph(vec, LinExpr::variable(t));
    program.set_objective(LinExpr::variable(t));
    const auto outcome = program.solve();
    REQUIRE(outcome.status == SolveStatus::kOptimal);
    CHECK(outcome.primal[t] == doctest::Approx(25.0).epsilon(1e-6));
  }
  SUBCASE("empty vector means t >= 0") {
    ConicProgram program;
    const auto t = program.add_variable("t");
    program.add_quadratic_epigraph({}, LinExpr::variable(t));
    program.set_objective(LinExpr::variable(t));
    const auto outcome = program.solve();
    REQUIRE(outcome.status == SolveStatus::kOptimal);
    CHECK(outcome.primal[t] == doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("single pinned variable") {
    ConicProgram program;
    const auto x = program.add_variable("x");
    const auto t = program.add_variable("t");
    program.add_equality(LinExpr::variable(x) - LinExpr(2.0));
    const std::vector<LinExpr> vec = {LinExpr::variable(x)};
    program.add_quadratic_epigraph(vec, LinExpr::variable(t));
    program.set_objective(LinExpr::variable(t));
    const auto outcome = program.solve();
    REQUIRE(outcome.status == SolveStatus::kOptimal);
    CHECK(outcome.primal[t] == doctest::Approx(4.0).epsilon(1e-6));
  }
}

TEST_CASE("exp rate constraint: 2^R - 1 <= rhs") {
  auto max_rate = [](double rhs) {
    ConicProgram program;
    const auto r = program.add_variable("R");
    program.add_exp_rate_constraint(LinExpr::variable(r), LinExpr(rhs));
    program.set_objective(-1.0 * LinExpr::variable(r));
    const auto outcome = program.solve();
    REQUIRE(outcome.status == SolveStatus::kOptimal);
    return outcome.primal[r];
  };
  CHECK(max_rate(3.0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(max_rate(0.0) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(max_rate(1.0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("statuses: infeasible and unbounded are returned, not raised") {
  ConicProgram infeasible;
  const auto x = infeasible.add_variable("x");
  infeasible.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));
  infeasible.add_nonneg(LinExpr(0.0) - LinExpr::variable(x));
  infeasible.set_objective(LinExpr::variable(x));
  auto outcome = infeasible.solve();
  CHECK(outcome.status == SolveStatus::kInfeasible);
  CHECK(outcome.primal.empty());  // primal present iff optimal

  ConicProgram unbounded;
  const auto y = unbounded.add_variable("y");
  unbounded.add_nonneg(LinExpr(0.0) - LinExpr::variable(y));  // y <= 0
  unbounded.set_objective(LinExpr::variable(y));
  outcome = unbounded.solve();
  CHECK(outcome.status == SolveStatus::kUnbounded);
  CHECK(outcome.primal.empty());
}

TEST_CASE("round trip: solution satisfies every cone block") {
  ConicProgram program;
  const auto x = program.add_variables("x", 3);
  program.add_nonneg(LinExpr::variable(x[0]) - LinExpr(0.5));
  program.add_constraint(ConeTag::kSoc, {LinExpr::variable(x[1]), LinExpr::variable(x[0]),
                                         LinExpr(0.25)});
  program.add_exp_rate_constraint(LinExpr::variable(x[2]),
                                  LinExpr::variable(x[1]) * 0.5);
  program.add_nonneg(LinExpr::variable(x[2]) - LinExpr(0.3));
  LinExpr objective;
  objective += LinExpr::variable(x[0]);
  objective += LinExpr::variable(x[1]);
  objective += LinExpr::variable(x[2]) * 0.1;
  program.set_objective(objective);
  const auto outcome = program.solve({1e-9, 200, false});
  REQUIRE(outcome.status == SolveStatus::kOptimal);
  CHECK(program.max_violation(outcome.primal) <= 1e-7);
}

TEST_CASE("weak duality sanity: optimum below any feasible point") {
  ConicProgram program;
  const auto x = program.add_variable("x");
  const auto t = program.add_variable("t");
  program.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));
  const std::vector<LinExpr> vec = {LinExpr::variable(x)};
  program.add_quadratic_epigraph(vec, LinExpr::variable(t));
  program.set_objective(LinExpr::variable(t));
  const auto outcome = program.solve();
  REQUIRE(outcome.status == SolveStatus::kOptimal);
  // (x, t) = (2, 5) is feasible with objective 5
  CHECK(outcome.objective <= 5.0 + 1e-7);
  CHECK(outcome.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("complex lifting preserves the squared norm") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXcd f = testing::random_cvec(6, rng);
    const Eigen::VectorXd x = lift_vector(f);
    CHECK(x.squaredNorm() == doctest::Approx(f.squaredNorm()).epsilon(1e-14));
    const Eigen::VectorXcd back = unlift_vector(x);
    CHECK((back - f).norm() == doctest::Approx(0.0));

    const Eigen::VectorXcd h = testing::random_cvec(6, rng);
    const std::complex<double> inner = h.dot(f);
    CHECK(lift_inner_re(h).dot(x) == doctest::Approx(inner.real()).epsilon(1e-12));
    CHECK(lift_inner_im(h).dot(x) == doctest::Approx(inner.imag()).epsilon(1e-12));
  }
}

TEST_CASE("unregistered variables are rejected") {
  ConicProgram program;
  program.add_variable("x");
  LinExpr bad = LinExpr::variable(5);
  CHECK_THROWS_AS(program.add_nonneg(bad), DimensionError);
}

TEST_CASE("cbf dump has the expected sections") {
  ConicProgram program;
  const auto x = program.add_variable("x");
  const auto t = program.add_variable("t");
  program.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));
  const std::vector<LinExpr> vec = {LinExpr::variable(x)};
  program.add_quadratic_epigraph(vec, LinExpr::variable(t));
  program.add_exp_rate_constraint(LinExpr::variable(x), LinExpr(3.0));
  program.set_objective(LinExpr::variable(t));
  std::ostringstream out;
  program.write_cbf(out);
  const std::string text = out.str();
  for (const char* section : {"VER", "OBJSENSE", "VAR", "CON", "ACOORD", "BCOORD", "L+",
                              "QR", "EXP"})
    CHECK(text.find(section) != std::string::npos);
}
