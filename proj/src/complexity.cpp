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

#include "snmpc/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <vector>

#include "snmpc/solver.hpp"

namespace snmpc {

void CostModel::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw ContractViolation("CostModel: c1 and c2 must be positive");
  }
}

std::uint64_t predicted_f_evals(std::span<const std::size_t> samples_per_step) {
  const std::size_t N = samples_per_step.size();
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < N; ++j) {
    total += static_cast<std::uint64_t>(N - j) * samples_per_step[j];
  }
  return total;
}

std::uint64_t predicted_cost_evals(std::span<const std::size_t> samples_per_step) {
  return std::accumulate(samples_per_step.begin(), samples_per_step.end(), std::uint64_t{0});
}

double predicted_serial(std::span<const std::size_t> samples_per_step, const CostModel &model) {
  return model.c1 * static_cast<double>(predicted_f_evals(samples_per_step)) +
         model.c2 * static_cast<double>(predicted_cost_evals(samples_per_step));
}

ComplexityReport predicted_bounds(std::size_t max_samples, std::size_t horizon,
                                  const CostModel &model, std::size_t lanes) {
  if (horizon < 1 || lanes < 1) {
    throw ContractViolation("predicted_bounds: horizon and lanes must be at least 1");
  }
  const double n = static_cast<double>(max_samples);
  const double N = static_cast<double>(horizon);
  const double per_sample = model.c1 * N * (N + 1.0) / 2.0 + model.c2 * N;
  const std::size_t rounds = (max_samples + lanes - 1) / lanes;

  ComplexityReport r;
  const std::vector<std::size_t> uniform(horizon, max_samples);
  r.serial_exact = predicted_serial(uniform, model);
  r.serial_bound = n * model.c1 * N * (N + 1.0) / 2.0 + model.c2 * N * n;
  r.full_parallel = per_sample;
  r.p_parallel = static_cast<double>(rounds) * per_sample;
  return r;
}

ComplexityComparison compare(const SolveResult &measured,
                             std::span<const std::size_t> samples_per_step,
                             const ComplexityReport &predicted, const CostModel &model,
                             bool pruning) {
  auto ratio = [](double a, double b) { return b == 0.0 ? (a == 0.0 ? 1.0 : 0.0) : a / b; };
  const std::uint64_t want_f = predicted_f_evals(samples_per_step);
  const std::uint64_t want_c = predicted_cost_evals(samples_per_step);

  ComplexityComparison c;
  c.f_ratio = ratio(static_cast<double>(measured.f_evals), static_cast<double>(want_f));
  c.cost_ratio = ratio(static_cast<double>(measured.cost_evals), static_cast<double>(want_c));
  c.measured_ops = model.c1 * static_cast<double>(measured.f_evals) +
                   model.c2 * static_cast<double>(measured.cost_evals);
  c.bound_ratio = ratio(c.measured_ops, predicted.serial_bound);
  if (measured.budget_hit) {
    c.note = "time budget hit; counts cover a partial sweep";
  } else if (!pruning && (measured.f_evals != want_f || measured.cost_evals != want_c)) {
    c.violation = true;
    c.note = "pruning off but counters differ from the exact operation count";
  } else if (pruning && (measured.f_evals > want_f || measured.cost_evals > want_c)) {
    c.violation = true;
    c.note = "pruned counters exceed the unpruned operation count";
  }
  return c;
}

CostModel calibrate_cost_model(const Problem &problem, std::size_t repeats) {
  using Clock = std::chrono::steady_clock;
  repeats = std::max<std::size_t>(repeats, 1);
  const StateVec x = problem.model.equilibrium_state;
  const InputVec u = problem.model.equilibrium_input;
  const Plan plan(problem.horizon(), u);
  const Trajectory traj = rollout(problem.model, x, plan);

  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  // Each sample times a small batch so that clock resolution does not dominate.
  constexpr int kBatch = 16;
  volatile double sink = 0.0;
  std::vector<double> step_times;
  std::vector<double> cost_times;
  step_times.reserve(repeats);
  cost_times.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    auto t0 = Clock::now();
    for (int b = 0; b < kBatch; ++b) {
      const StateVec next = problem.model.step(x, u);
      sink = sink + (problem.constraints.state_admissible(next) ? next[0] : 0.0);
    }
    auto t1 = Clock::now();
    for (int b = 0; b < kBatch; ++b) {
      sink = sink + evaluate_cost(problem.cost, traj, plan);
    }
    auto t2 = Clock::now();
    step_times.push_back(std::chrono::duration<double>(t1 - t0).count() / kBatch);
    cost_times.push_back(std::chrono::duration<double>(t2 - t1).count() / kBatch);
  }
  CostModel model;
  model.c1 = std::max(median(step_times), 1e-12);
  model.c2 = std::max(median(cost_times), 1e-12);
  model.units = "seconds";
  return model;
}

} // namespace snmpc
