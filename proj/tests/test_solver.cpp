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

#include "oracles.hpp"
#include "snmpc/models.hpp"
#include "snmpc/solver.hpp"

using namespace snmpc;
namespace m = snmpc::models;
using snmpc::testing::brute_force_sweep;

namespace {

// Replays the solver's draws: position N-1 first, then N-2, ...
std::vector<std::vector<InputVec>> replay_draws(SamplerState s, const BoxSet &box,
                                                const std::vector<std::size_t> &n) {
  std::vector<std::vector<InputVec>> per_step(n.size());
  for (std::size_t step = 0; step < n.size(); ++step) {
    const std::size_t j = n.size() - 1 - step;
    per_step[j] = draw_samples(s, box, n[j]);
  }
  return per_step;
}

SolverConfig config(std::size_t N, std::size_t samples, SamplerScheme scheme, std::uint64_t seed = 1) {
  SolverConfig cfg = SolverConfig::uniform(N, samples);
  cfg.sampler.scheme = scheme;
  cfg.sampler.seed = seed;
  cfg.oracle_budget = 200000;
  return cfg;
}

Problem cart_without_terminal_set(std::size_t N) {
  Problem p = m::cart_spring_problem(N);
  p.constraints.terminal.reset();
  return p;
}

} // namespace

TEST_CASE("single sweep matches the brute-force oracle on the cart example") {
  const Problem p = cart_without_terminal_set(2);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  for (std::size_t n : {3u, 5u}) {
    const SolverConfig cfg = config(2, n, SamplerScheme::Grid);
    const Plan warm = find_oracle(x0, p, cfg);
    SamplerState s(cfg.sampler);
    const auto expected = brute_force_sweep(p, x0, warm, replay_draws(s, p.constraints.input_box, cfg.samples_per_step));
    const SolveResult r = improve_plan(x0, warm, p, cfg, s);
    CHECK(r.cost == expected.cost);
    CHECK(r.plan == expected.plan);
    CHECK(r.cost <= r.warm_cost);
  }
}

TEST_CASE("single sweep matches the brute-force oracle across plants and schemes") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t N = 1 + static_cast<std::size_t>(trial % 4);
    const auto scheme = std::array{SamplerScheme::Grid, SamplerScheme::Halton, SamplerScheme::Random}[trial % 3];
    Problem p;
    StateVec x0;
    switch (trial % 3) {
    case 0:
      p = m::cart_spring_problem(N);
      x0 = Eigen::Vector2d(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
      break;
    case 1:
      p = m::buck_boost_problem(N);
      x0 = m::buck_boost_equilibrium_state() + Eigen::Vector2d(0.4 * unit(rng) - 0.2, 0.2 * unit(rng) - 0.1);
      break;
    default:
      p = m::wmr_problem(N);
      x0 = Eigen::Vector3d(4.0 * unit(rng) - 2.0, 6.0 * unit(rng), unit(rng));
      break;
    }
    SolverConfig cfg = config(N, 1 + static_cast<std::size_t>(trial % 7), scheme, static_cast<std::uint64_t>(trial));
    cfg.pruning = trial % 2 == 0;
    Plan warm;
    try {
      warm = find_oracle(x0, p, cfg);
    } catch (const NoOracle &) {
      continue;
    }
    SamplerState s(cfg.sampler);
    s.counter = static_cast<std::uint64_t>(trial);
    const auto expected = brute_force_sweep(p, x0, warm, replay_draws(s, p.constraints.input_box, cfg.samples_per_step));
    const SolveResult r = improve_plan(x0, warm, p, cfg, s);
    CHECK(r.cost == expected.cost);
    CHECK(r.plan == expected.plan);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("counters without pruning equal the loop-structure sums") {
  const Problem p = m::cart_spring_problem(10);
  SolverConfig cfg = config(10, 10, SamplerScheme::Halton);
  cfg.pruning = false;
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  const Plan warm = find_oracle(x0, p, cfg);
  SamplerState s(cfg.sampler);
  const SolveResult r = improve_plan(x0, warm, p, cfg, s);
  CHECK(r.f_evals == 550);
  CHECK(r.cost_evals == 100);
  CHECK(s.counter == 100);

  SUBCASE("non-uniform n_j") {
    cfg.samples_per_step = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    SamplerState s2(cfg.sampler);
    const SolveResult r2 = improve_plan(x0, warm, p, cfg, s2);
    std::uint64_t f = 0;
    for (std::size_t j = 0; j < 10; ++j) {
      f += (10 - j) * j;
    }
    CHECK(r2.f_evals == f);
    CHECK(r2.cost_evals == 45);
  }

  SUBCASE("pruning only removes work and keeps the result") {
    cfg.pruning = true;
    SamplerState s3(cfg.sampler);
    const SolveResult pruned = improve_plan(x0, warm, p, cfg, s3);
    CHECK(pruned.f_evals <= 550);
    CHECK(pruned.cost_evals <= 100);
    CHECK(pruned.plan == r.plan);
    CHECK(pruned.cost == r.cost);
  }
}

TEST_CASE("sweep invariants") {
  const Problem p = m::cart_spring_problem(10);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SolverConfig cfg = config(10, 10, SamplerScheme::Random, seed);
    const Plan warm = find_oracle(x0, p, cfg);
    SamplerState s(cfg.sampler);
    const SolveResult r = improve_plan(x0, warm, p, cfg, s);
    CHECK(r.cost <= r.warm_cost);
    CHECK(r.cost >= 0.0);
    REQUIRE(r.step_costs.size() == 10);
    double last = r.warm_cost;
    for (double c : r.step_costs) {
      CHECK(c <= last);
      last = c;
    }
    CHECK(r.step_costs.back() == r.cost);
    CHECK(check_feasible(p.constraints, r.trajectory, r.plan).feasible);
    CHECK(r.trajectory.states == rollout(p.model, x0, r.plan).states);
    CHECK_FALSE(r.budget_hit);
  }
}

TEST_CASE("lane count does not change the result") {
  const Problem p = m::cart_spring_problem(10);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  SolverConfig base = config(10, 30, SamplerScheme::Random, 7);
  const Plan warm = find_oracle(x0, p, base);
  std::optional<SolveResult> first;
  for (std::size_t lanes : {1u, 2u, 3u, 8u}) {
    SolverConfig cfg = base;
    cfg.lanes = lanes;
    SamplerState s(cfg.sampler);
    const SolveResult r = improve_plan(x0, warm, p, cfg, s);
    if (!first) {
      first = r;
      continue;
    }
    CHECK(r.plan == first->plan);
    CHECK(r.cost == first->cost);
    CHECK(r.f_evals == first->f_evals);
    CHECK(r.cost_evals == first->cost_evals);
    CHECK(r.improvements == first->improvements);
  }
}

TEST_CASE("zero samples hands the warm start back") {
  const Problem p = m::cart_spring_problem(10);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  const SolverConfig cfg = config(10, 0, SamplerScheme::Halton);
  const Plan warm = find_oracle(x0, p, cfg);
  SamplerState s(cfg.sampler);
  const SolveResult r = improve_plan(x0, warm, p, cfg, s);
  CHECK(r.plan == warm);
  CHECK(r.cost == r.warm_cost);
  CHECK(r.f_evals == 0);
  CHECK(r.cost_evals == 0);
  CHECK(s.counter == 0);
}

TEST_CASE("time budget") {
  const Problem p = m::cart_spring_problem(10);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  SolverConfig cfg = config(10, 30, SamplerScheme::Halton);
  cfg.time_budget = std::chrono::nanoseconds(1);
  cfg.pruning = false;
  const Plan warm = find_oracle(x0, p, cfg);
  SamplerState s(cfg.sampler);
  const SolveResult r = improve_plan(x0, warm, p, cfg, s);
  CHECK(r.budget_hit);
  CHECK(r.cost_evals == 1);
  CHECK(r.f_evals == 1);
  CHECK(r.cost <= r.warm_cost);
  CHECK(check_feasible(p.constraints, r.trajectory, r.plan).feasible);

  cfg.time_budget = std::chrono::seconds(60);
  SamplerState s2(cfg.sampler);
  CHECK_FALSE(improve_plan(x0, warm, p, cfg, s2).budget_hit);
}

TEST_CASE("rejections") {
  const Problem p = m::cart_spring_problem(2);
  const SolverConfig cfg = config(2, 3, SamplerScheme::Grid);
  SamplerState s(cfg.sampler);
  CHECK_THROWS_AS(improve_plan(Eigen::Vector2d(-2.5, 3.0), Plan(2, InputVec::Zero(1)), p, cfg, s),
                  RejectedInput);
  CHECK_THROWS_AS(improve_plan(StateVec::Zero(2), Plan(3, InputVec::Zero(1)), p, cfg, s),
                  ContractViolation);

  SolverConfig tiny = cfg;
  tiny.oracle_budget = 50;
  // No admissible pair of forces reaches the terminal set from here in two steps.
  CHECK_THROWS_AS(find_oracle(Eigen::Vector2d(-2.5, 3.0), p, tiny), NoOracle);

  SolverConfig bad = cfg;
  bad.samples_per_step = {3};
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  bad = cfg;
  bad.warm_start_mode = WarmStartMode::Provided;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  CHECK(parse_warm_start_mode(to_string(WarmStartMode::FeasibleSample)) == WarmStartMode::FeasibleSample);
  CHECK_THROWS_AS(parse_warm_start_mode("lqr"), ConfigError);
}

TEST_CASE("oracle search is deterministic in the seed") {
  const Problem p = m::cart_spring_problem(10);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);
  const SolverConfig cfg = config(10, 10, SamplerScheme::Halton, 3);
  const Plan a = find_oracle(x0, p, cfg);
  CHECK(a == find_oracle(x0, p, cfg));
  CHECK(check_feasible(p.constraints, rollout(p.model, x0, a), a).feasible);
}

TEST_CASE("terminal-law warm start decreases the cost by at least the first stage") {
  const Problem p = m::cart_spring_problem(10);
  SolverConfig cfg = config(10, 10, SamplerScheme::Halton);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-2.5, 2.5), vel(-3.0, 3.0);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const StateVec x = Eigen::Vector2d(pos(rng), vel(rng));
    Plan warm;
    try {
      cfg.oracle_budget = 20000;
      warm = find_oracle(x, p, cfg);
    } catch (const NoOracle &) {
      continue;
    }
    SamplerState s(cfg.sampler);
    const SolveResult r = improve_plan(x, warm, p, cfg, s);
    const StateVec x1 = p.model.step(x, r.plan.front());
    const Plan next = make_warm_start(r, x1, p, cfg, s);
    const double next_cost = evaluate_cost(p.cost, rollout(p.model, x1, next), next);
    CHECK(next_cost <= r.cost - p.cost.stage(0, x, r.plan.front()) + 1e-9);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("feasible-sample warm start") {
  const Problem p = m::wmr_problem(5);
  SolverConfig cfg = config(5, 30, SamplerScheme::Random);
  cfg.warm_start_mode = WarmStartMode::FeasibleSample;
  const StateVec x0 = Eigen::Vector3d(0.0, 6.0, 0.0);
  const Plan warm0 = find_oracle(x0, p, cfg);
  SamplerState s(cfg.sampler);
  const SolveResult r = improve_plan(x0, warm0, p, cfg, s);
  const StateVec x1 = p.model.step(x0, r.plan.front());

  SamplerState ws(cfg.sampler);
  const Plan warm = make_warm_start(r, x1, p, cfg, ws);
  for (std::size_t i = 0; i + 1 < 5; ++i) {
    CHECK(warm[i] == r.plan[i + 1]);
  }
  CHECK(check_feasible(p.constraints, rollout(p.model, x1, warm), warm).feasible);

  cfg.warm_start_budget = 0;
  CHECK_THROWS_AS(make_warm_start(r, x1, p, cfg, ws), WarmStartFailure);

  cfg.warm_start_mode = WarmStartMode::TerminalController;
  CHECK_THROWS_AS(make_warm_start(r, x1, p, cfg, ws), WarmStartFailure);
}

TEST_CASE("closed loop") {
  const Problem p = m::cart_spring_problem(10);
  const SolverConfig cfg = config(10, 10, SamplerScheme::Halton);
  const StateVec x0 = Eigen::Vector2d(-2.5, 3.0);

  const RunLog none = closed_loop(p, cfg, x0, 0);
  CHECK(none.steps.empty());
  CHECK(none.final_state == x0);

  const RunLog log = closed_loop(p, cfg, x0, 12);
  REQUIRE(log.steps.size() == 12);
  for (std::size_t k = 0; k < log.steps.size(); ++k) {
    const auto &rec = log.steps[k];
    CHECK(rec.k == k);
    CHECK(rec.cost <= rec.warm_cost);
    if (k > 0) {
      const auto &prev = log.steps[k - 1];
      CHECK(rec.state == p.model.step(prev.state, prev.input));
      CHECK(rec.cost <= prev.cost - p.cost.stage(0, prev.state, prev.input) + 1e-9);
    }
  }
  CHECK(closed_loop(p, cfg, x0, 12).final_state == log.final_state);

  SUBCASE("improve_initial off keeps the oracle at k = 0") {
    SolverConfig idle = cfg;
    idle.improve_initial = false;
    const RunLog l = closed_loop(p, idle, x0, 1);
    CHECK(l.steps[0].cost == l.steps[0].warm_cost);
    CHECK(l.steps[0].f_evals == 0);
  }

  SUBCASE("provided initial plan") {
    SolverConfig given = cfg;
    given.initial_plan = find_oracle(x0, p, cfg);
    given.warm_start_mode = WarmStartMode::Provided;
    const RunLog l = closed_loop(p, given, x0, 3);
    CHECK(l.steps.size() == 3);
    CHECK(l.steps[0].warm_cost ==
          evaluate_cost(p.cost, rollout(p.model, x0, *given.initial_plan), *given.initial_plan));
  }
}
