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

#ifndef SNMPC_SOLVER_HPP
#define SNMPC_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "snmpc/core.hpp"
#include "snmpc/lane_pool.hpp"
#include "snmpc/sampling.hpp"

namespace snmpc {

enum class WarmStartMode { TerminalController, FeasibleSample, Provided };

std::string to_string(WarmStartMode mode);
WarmStartMode parse_warm_start_mode(const std::string &name);

struct SolverConfig {
  std::size_t horizon = 10;
  /// n_j for j = 0..N-1.
  std::vector<std::size_t> samples_per_step = std::vector<std::size_t>(10, 10);
  SamplerConfig sampler;
  std::size_t lanes = 1;
  std::optional<std::chrono::nanoseconds> time_budget;
  /// Stop a candidate's rollout at its first constraint violation.
  bool pruning = true;
  /// Random full sequences tried when searching for an initial plan.
  std::size_t oracle_budget = 1'000'000;
  WarmStartMode warm_start_mode = WarmStartMode::TerminalController;
  /// Appended inputs tried by the feasible-sample warm start.
  std::size_t warm_start_budget = 10'000;
  /// Run the improvement sweep on the k = 0 plan too.
  bool improve_initial = true;
  /// Plan used at k = 0 instead of the oracle.
  std::optional<Plan> initial_plan;

  /// n_j = samples for every j.
  static SolverConfig uniform(std::size_t horizon, std::size_t samples);

  void validate() const;
};

struct SolveResult {
  Plan plan;
  Trajectory trajectory; ///< rollout of `plan` from the solve state
  double cost = 0.0;      ///< J_sub
  double warm_cost = 0.0; ///< J of the warm start handed in
  std::uint64_t f_evals = 0;
  std::uint64_t cost_evals = 0;
  std::uint64_t improvements = 0;
  /// Reference cost after each backward step, in sweep order (j = N-1 first).
  std::vector<double> step_costs;
  std::chrono::nanoseconds elapsed{0};
  bool budget_hit = false;
};

/// One backward sweep of sampled single-position replacements over `warm`.
///
/// At step j every candidate replaces position j of the reference held at
/// the start of that step. Candidates are evaluated independently (on up to
/// cfg.lanes lanes, via `pool` when given) and reduced in sample order: the
/// feasible candidate of minimum cost replaces the reference if its cost is
/// strictly lower. Throws RejectedInput when `warm` is infeasible for `x`.
SolveResult improve_plan(const StateVec &x, const Plan &warm, const Problem &problem,
                         const SolverConfig &cfg, SamplerState &sampler,
                         LanePool *pool = nullptr);

/// First random sequence in U^N that is feasible for `x`. Deterministic in
/// cfg.sampler.seed. Throws NoOracle after cfg.oracle_budget failed draws.
Plan find_oracle(const StateVec &x, const Problem &problem, const SolverConfig &cfg);

/// Shifts prev.plan and appends an input so that the result is feasible for
/// `x_new`. Throws WarmStartFailure when no such input is found.
Plan make_warm_start(const SolveResult &prev, const StateVec &x_new, const Problem &problem,
                     const SolverConfig &cfg, SamplerState &sampler);

struct StepRecord {
  std::size_t k = 0;
  StateVec state;
  InputVec input;
  double warm_cost = 0.0;
  double cost = 0.0;
  std::uint64_t f_evals = 0;
  std::uint64_t cost_evals = 0;
  std::uint64_t improvements = 0;
  std::chrono::nanoseconds elapsed{0};
  bool budget_hit = false;
};

struct RunLog {
  StateVec initial_state;
  StateVec final_state;
  Eigen::Index input_dim = 0;
  std::vector<StepRecord> steps;
  std::string termination = "completed";
};

/// Owns the sampler streams and lanes for one receding-horizon controller.
class Solver {
public:
  Solver(Problem problem, SolverConfig cfg);

  const Problem &problem() const { return problem_; }
  const SolverConfig &config() const { return cfg_; }

  SolveResult improve(const StateVec &x, const Plan &warm);
  Plan find_oracle(const StateVec &x) const;
  Plan make_warm_start(const SolveResult &prev, const StateVec &x_new);
  /// k = 0 plan: the configured initial plan or the oracle, then optionally improved.
  SolveResult initial_solve(const StateVec &x0);

private:
  Problem problem_;
  SolverConfig cfg_;
  SamplerState sampler_;
  SamplerState warm_sampler_;
  std::unique_ptr<LanePool> pool_;
};

/// Runs `steps` receding-horizon iterations from x0 and logs each one.
RunLog closed_loop(const Problem &problem, const SolverConfig &cfg, const StateVec &x0,
                   std::size_t steps);

} // namespace snmpc

#endif // SNMPC_SOLVER_HPP
