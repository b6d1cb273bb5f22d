/*
 Copyright 2026 The sampled-nmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "doctest.h"

#include <random>

#include "snmpc/complexity.hpp"
#include "snmpc/models.hpp"
#include "snmpc/solver.hpp"

using namespace snmpc;

TEST_CASE("operation counts for the reference configuration") {
  const std::vector<std::size_t> n(10, 10);
  CHECK(predicted_f_evals(n) == 550);
  CHECK(predicted_cost_evals(n) == 100);
  CHECK(predicted_serial(n, CostModel{}) == 650.0);

  const ComplexityReport r = predicted_bounds(10, 10, CostModel{}, 3);
  CHECK(r.serial_exact == 650.0);
  CHECK(r.serial_bound == 650.0);
  CHECK(r.full_parallel == 65.0);
  CHECK(r.p_parallel == 260.0);

  const ComplexityReport one_lane = predicted_bounds(10, 10, CostModel{}, 1);
  CHECK(one_lane.p_parallel == one_lane.serial_bound);
  const ComplexityReport all_lanes = predicted_bounds(10, 10, CostModel{}, 10);
  CHECK(all_lanes.p_parallel == all_lanes.full_parallel);
}

TEST_CASE("zero samples cost nothing") {
  const ComplexityReport r = predicted_bounds(0, 7, CostModel{2.0, 3.0, "ops"}, 4);
  CHECK(r.serial_exact == 0.0);
  CHECK(r.serial_bound == 0.0);
  CHECK(r.p_parallel == 0.0);
  CHECK(predicted_f_evals(std::vector<std::size_t>{}) == 0);
}

TEST_CASE("exact count equals the uniform bound and parallel time falls with lanes") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> n_dist(0, 200), N_dist(1, 120), p_dist(1, 64);
  std::uniform_int_distribution<int> mant(1, 1 << 10), expo(-8, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = n_dist(rng);
    const std::size_t N = N_dist(rng);
    // Dyadic unit costs keep every product exact.
    const CostModel model{std::ldexp(mant(rng), expo(rng)), std::ldexp(mant(rng), expo(rng)), "ops"};
    const std::size_t p = p_dist(rng);
    const ComplexityReport r = predicted_bounds(n, N, model, p);
    CHECK(r.serial_exact == r.serial_bound);
    CHECK(r.serial_exact == predicted_serial(std::vector<std::size_t>(N, n), model));
    CHECK(predicted_bounds(n, N, model, p + 1).p_parallel <= r.p_parallel);
    CHECK(r.p_parallel >= r.full_parallel * (n > 0 ? 1.0 : 0.0));
    CHECK(r.p_parallel <= r.serial_bound);
  }
}

TEST_CASE("compare flags counter drift") {
  const std::vector<std::size_t> n(10, 10);
  const ComplexityReport pred = predicted_bounds(10, 10, CostModel{}, 1);
  SolveResult measured;
  measured.f_evals = 550;
  measured.cost_evals = 100;

  auto c = compare(measured, n, pred, CostModel{}, false);
  CHECK_FALSE(c.violation);
  CHECK(c.f_ratio == 1.0);
  CHECK(c.bound_ratio == 1.0);

  measured.f_evals = 549;
  CHECK(compare(measured, n, pred, CostModel{}, false).violation);
  CHECK_FALSE(compare(measured, n, pred, CostModel{}, true).violation);
  measured.f_evals = 551;
  CHECK(compare(measured, n, pred, CostModel{}, true).violation);
  measured.budget_hit = true;
  CHECK_FALSE(compare(measured, n, pred, CostModel{}, false).violation);
}

TEST_CASE("unit cost calibration") {
  const Problem p = models::cart_spring_problem(10);
  const CostModel m = calibrate_cost_model(p, 200);
  CHECK(m.units == "seconds");
  CHECK(m.c1 > 0.0);
  CHECK(m.c2 > 0.0);
  CHECK(m.c1 < 1e-3);
  CHECK(m.c2 < 1e-3);
}

TEST_CASE("predicted bounds reject empty horizons") {
  CHECK_THROWS_AS(predicted_bounds(10, 0, CostModel{}, 1), ContractViolation);
  CHECK_THROWS_AS(predicted_bounds(10, 10, CostModel{}, 0), ContractViolation);
}
