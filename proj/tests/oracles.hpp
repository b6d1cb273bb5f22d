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

// Test-only reference implementations. These recompute everything from full
// rollouts and never touch the solver's cached prefixes or candidate path.

#ifndef SNMPC_TESTS_ORACLES_HPP
#define SNMPC_TESTS_ORACLES_HPP

#include <optional>
#include <vector>

#include "snmpc/core.hpp"

namespace snmpc::testing {

struct SweepOutcome {
  Plan plan;
  double cost = 0.0;
};

/// Backward single-position replacement sweep by exhaustive evaluation.
/// samples[j] holds the candidates tried at position j.
inline SweepOutcome brute_force_sweep(const Problem &problem, const StateVec &x, const Plan &warm,
                                      const std::vector<std::vector<InputVec>> &samples) {
  Plan reference = warm;
  double best = evaluate_cost(problem.cost, rollout(problem.model, x, warm), warm);
  for (std::size_t step = 0; step < warm.size(); ++step) {
    const std::size_t j = warm.size() - 1 - step;
    const Plan snapshot = reference;
    std::optional<Plan> winner;
    for (const InputVec &u : samples[j]) {
      Plan candidate = snapshot;
      candidate[j] = u;
      const Trajectory traj = rollout(problem.model, x, candidate);
      if (!check_feasible(problem.constraints, traj, candidate, 0).feasible) {
        continue;
      }
      const double c = evaluate_cost(problem.cost, traj, candidate);
      if (c < best) {
        best = c;
        winner = candidate;
      }
    }
    if (winner) {
      reference = *winner;
    }
  }
  return {reference, best};
}

} // namespace snmpc::testing

#endif // SNMPC_TESTS_ORACLES_HPP
