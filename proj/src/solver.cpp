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

#include "snmpc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

namespace snmpc {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kOracleStream = 0x6f7261636c65ull; // "oracle"
constexpr std::uint64_t kWarmStream = 0x7761726dull;       // "warm"
constexpr std::size_t kWarmBatch = 64;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ (stream * 0x9e3779b97f4a7c15ull);
}

struct CandidateOutcome {
  bool evaluated = false;
  bool feasible = false;
  bool cost_evaluated = false;
  double cost = 0.0;
  std::uint32_t f_evals = 0;
};

// Replaces position j of `reference` by `u` and rolls forward from the cached
// state at j. Stage costs before j come from the cached prefix sum.
CandidateOutcome evaluate_candidate(const Problem &problem, const Plan &reference,
                                    const StateVec &state_j, double prefix_cost, std::size_t j,
                                    const InputVec &u, bool pruning) {
  const auto &cons = problem.constraints;
  const auto &cost = problem.cost;
  const std::size_t N = reference.size();

  CandidateOutcome out;
  out.evaluated = true;
  out.feasible = cons.input_admissible(u);
  if (!out.feasible && pruning) {
    return out;
  }
  double total = prefix_cost + cost.stage(j, state_j, u);
  StateVec x = state_j;
  for (std::size_t i = j + 1; i <= N; ++i) {
    x = problem.model.step(x, i - 1 == j ? u : reference[i - 1]);
    ++out.f_evals;
    if (!cons.state_admissible(x) || (i == N && !cons.terminal_admissible(x))) {
      out.feasible = false;
      if (pruning) {
        return out;
      }
    }
    if (i < N) {
      total += cost.stage(i, x, reference[i]);
    }
  }
  out.cost = total + cost.terminal(x);
  out.cost_evaluated = true;
  return out;
}

std::string describe_violation(const FeasibilityReport &r) {
  std::ostringstream os;
  os << to_string(*r.violation_kind) << " violation at horizon index " << *r.violation_index;
  return os.str();
}

} // namespace

std::string to_string(WarmStartMode mode) {
  switch (mode) {
  case WarmStartMode::TerminalController:
    return "terminal-controller";
  case WarmStartMode::FeasibleSample:
    return "feasible-sample";
  case WarmStartMode::Provided:
    return "provided";
  }
  return "unknown";
}

WarmStartMode parse_warm_start_mode(const std::string &name) {
  if (name == "terminal-controller") {
    return WarmStartMode::TerminalController;
  }
  if (name == "feasible-sample") {
    return WarmStartMode::FeasibleSample;
  }
  if (name == "provided") {
    return WarmStartMode::Provided;
  }
  throw ConfigError("unknown warm start mode '" + name +
                    "' (expected terminal-controller, feasible-sample or provided)");
}

SolverConfig SolverConfig::uniform(std::size_t horizon, std::size_t samples) {
  SolverConfig cfg;
  cfg.horizon = horizon;
  cfg.samples_per_step.assign(horizon, samples);
  return cfg;
}

void SolverConfig::validate() const {
  if (horizon < 1) {
    throw ContractViolation("SolverConfig: horizon must be at least 1");
  }
  if (samples_per_step.size() != horizon) {
    throw ContractViolation("SolverConfig: samples_per_step must have one entry per horizon step");
  }
  if (lanes < 1) {
    throw ContractViolation("SolverConfig: lanes must be at least 1");
  }
  if (initial_plan && initial_plan->size() != horizon) {
    throw ContractViolation("SolverConfig: initial plan length differs from the horizon");
  }
  if (warm_start_mode == WarmStartMode::Provided && !initial_plan) {
    throw ContractViolation("SolverConfig: warm start mode 'provided' needs an initial plan");
  }
}

// ---------------------------------------------------------------------------

SolveResult improve_plan(const StateVec &x, const Plan &warm, const Problem &problem,
                         const SolverConfig &cfg, SamplerState &sampler, LanePool *pool) {
  const auto start = Clock::now();
  const std::size_t N = warm.size();
  if (N != problem.horizon() || cfg.samples_per_step.size() != N) {
    throw ContractViolation("improve_plan: plan length, cost horizon and n_j list must agree");
  }

  SolveResult result;
  Trajectory ref_traj = rollout(problem.model, x, warm);
  if (const auto report = check_feasible(problem.constraints, ref_traj, warm, 0); !report.feasible) {
    throw RejectedInput("improve_plan: warm start is infeasible (" + describe_violation(report) +
                        ")");
  }
  result.warm_cost = evaluate_cost(problem.cost, ref_traj, warm);

  // States 0..j and stage costs 0..j-1 of the reference never change during
  // step j or any later (smaller) j, so one cache built from the warm start
  // serves the whole sweep.
  std::vector<double> prefix(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    prefix[i + 1] = prefix[i] + problem.cost.stage(i, ref_traj[i], warm[i]);
  }

  std::unique_ptr<LanePool> local_pool;
  if (pool == nullptr && cfg.lanes > 1) {
    local_pool = std::make_unique<LanePool>(cfg.lanes);
    pool = local_pool.get();
  }

  const auto deadline = cfg.time_budget ? std::optional(start + *cfg.time_budget) : std::nullopt;
  std::atomic<bool> expired{false};
  auto check_deadline = [&] {
    if (deadline && Clock::now() >= *deadline) {
      expired.store(true, std::memory_order_relaxed);
    }
  };

  Plan reference = warm;
  double best_cost = result.warm_cost;
  std::vector<CandidateOutcome> outcomes;
  result.step_costs.reserve(N);

  for (std::size_t step = 0; step < N; ++step) {
    const std::size_t j = N - 1 - step;
    if (step > 0) {
      check_deadline();
    }
    if (expired.load(std::memory_order_relaxed)) {
      break;
    }
    const std::vector<InputVec> samples =
        draw_samples(sampler, problem.constraints.input_box, cfg.samples_per_step[j]);
    outcomes.assign(samples.size(), CandidateOutcome{});

    auto body = [&](std::size_t q) {
      if (expired.load(std::memory_order_relaxed)) {
        return;
      }
      outcomes[q] = evaluate_candidate(problem, reference, ref_traj[j], prefix[j], j, samples[q],
                                       cfg.pruning);
      check_deadline();
    };
    if (pool != nullptr) {
      pool->run(samples.size(), body);
    } else {
      for (std::size_t q = 0; q < samples.size(); ++q) {
        body(q);
      }
    }

    // Deterministic reduction in sample order; the reference wins ties.
    std::optional<std::size_t> winner;
    for (std::size_t q = 0; q < outcomes.size(); ++q) {
      const auto &o = outcomes[q];
      result.f_evals += o.f_evals;
      result.cost_evals += o.cost_evaluated ? 1 : 0;
      if (o.feasible && o.cost_evaluated && o.cost < best_cost) {
        best_cost = o.cost;
        winner = q;
      }
    }
    if (winner) {
      reference[j] = samples[*winner];
      ++result.improvements;
    }
    result.step_costs.push_back(best_cost);
  }

  result.budget_hit = expired.load();
  result.trajectory = rollout(problem.model, x, reference);
  if (const auto report = check_feasible(problem.constraints, result.trajectory, reference, 0);
      !report.feasible) {
    throw std::logic_error("improve_plan: accepted plan failed re-verification (" +
                           describe_violation(report) + ")");
  }
  result.cost = evaluate_cost(problem.cost, result.trajectory, reference);
  result.plan = std::move(reference);
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

Plan find_oracle(const StateVec &x, const Problem &problem, const SolverConfig &cfg) {
  SamplerState draws(SamplerConfig{SamplerScheme::Random,
                                   stream_seed(cfg.sampler.seed, kOracleStream), 0, std::nullopt});
  for (std::size_t attempt = 0; attempt < cfg.oracle_budget; ++attempt) {
    Plan candidate(draw_samples(draws, problem.constraints.input_box, cfg.horizon));
    const Trajectory traj = rollout(problem.model, x, candidate);
    if (check_feasible(problem.constraints, traj, candidate, 0).feasible) {
      return candidate;
    }
  }
  std::ostringstream os;
  os << "find_oracle: no feasible sequence among " << cfg.oracle_budget << " random draws";
  throw NoOracle(os.str());
}

Plan make_warm_start(const SolveResult &prev, const StateVec &x_new, const Problem &problem,
                     const SolverConfig &cfg, SamplerState &sampler) {
  const auto &cons = problem.constraints;
  const std::size_t N = prev.plan.size();
  if (N == 0 || prev.trajectory.size() != N + 1) {
    throw ContractViolation("make_warm_start: previous result carries no plan/trajectory");
  }

  const bool use_law = cfg.warm_start_mode == WarmStartMode::TerminalController ||
                       (cfg.warm_start_mode == WarmStartMode::Provided && problem.terminal_law);
  if (use_law) {
    if (!problem.terminal_law) {
      throw WarmStartFailure("make_warm_start: plant '" + problem.model.name +
                             "' has no terminal law");
    }
    Plan warm = shift_plan(prev.plan, problem.terminal_law(prev.trajectory.back()));
    const Trajectory traj = rollout(problem.model, x_new, warm);
    if (const auto r = check_feasible(cons, traj, warm, 0); !r.feasible) {
      throw WarmStartFailure("make_warm_start: shifted plan with terminal law is infeasible (" +
                             describe_violation(r) + ")");
    }
    return warm;
  }

  // Feasible-sample: the first N-1 entries are fixed, only the append varies.
  Plan warm = shift_plan(prev.plan, prev.plan.back());
  const Trajectory traj = rollout(problem.model, x_new, warm);
  for (std::size_t i = 0; i < N; ++i) {
    if ((i + 1 < N && !cons.input_admissible(warm[i])) || !cons.state_admissible(traj[i])) {
      throw WarmStartFailure("make_warm_start: shifted prefix is infeasible");
    }
  }
  const StateVec &last = traj[N - 1];
  std::size_t tried = 0;
  while (tried < cfg.warm_start_budget) {
    const std::size_t batch = std::min(kWarmBatch, cfg.warm_start_budget - tried);
    for (const InputVec &u : draw_samples(sampler, cons.input_box, batch)) {
      const StateVec next = problem.model.step(last, u);
      if (cons.input_admissible(u) && cons.state_admissible(next) &&
          cons.terminal_admissible(next)) {
        warm[N - 1] = u;
        return warm;
      }
    }
    tried += batch;
  }
  std::ostringstream os;
  os << "make_warm_start: no feasible append among " << cfg.warm_start_budget << " samples";
  throw WarmStartFailure(os.str());
}

// ---------------------------------------------------------------------------

Solver::Solver(Problem problem, SolverConfig cfg)
    : problem_(std::move(problem)), cfg_(std::move(cfg)), sampler_(cfg_.sampler),
      warm_sampler_(cfg_.sampler) {
  problem_.validate();
  cfg_.validate();
  if (problem_.horizon() != cfg_.horizon) {
    throw ContractViolation("Solver: cost horizon differs from the configured horizon");
  }
  warm_sampler_.config.seed = stream_seed(cfg_.sampler.seed, kWarmStream);
  if (cfg_.lanes > 1) {
    pool_ = std::make_unique<LanePool>(cfg_.lanes);
  }
}

SolveResult Solver::improve(const StateVec &x, const Plan &warm) {
  return improve_plan(x, warm, problem_, cfg_, sampler_, pool_.get());
}

Plan Solver::find_oracle(const StateVec &x) const { return snmpc::find_oracle(x, problem_, cfg_); }

Plan Solver::make_warm_start(const SolveResult &prev, const StateVec &x_new) {
  return snmpc::make_warm_start(prev, x_new, problem_, cfg_, warm_sampler_);
}

SolveResult Solver::initial_solve(const StateVec &x0) {
  const auto start = Clock::now();
  const Plan initial = cfg_.initial_plan ? *cfg_.initial_plan : find_oracle(x0);
  SolveResult result;
  if (cfg_.improve_initial) {
    result = improve(x0, initial);
  } else {
    // Zero samples: verifies feasibility and fills the trajectory and costs.
    SolverConfig idle = cfg_;
    idle.samples_per_step.assign(cfg_.horizon, 0);
    result = improve_plan(x0, initial, problem_, idle, sampler_);
  }
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

RunLog closed_loop(const Problem &problem, const SolverConfig &cfg, const StateVec &x0,
                   std::size_t steps) {
  RunLog log;
  log.initial_state = x0;
  log.final_state = x0;
  log.input_dim = problem.model.m;
  if (steps == 0) {
    return log;
  }
  Solver solver(problem, cfg);
  StateVec x = x0;
  SolveResult current;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto start = Clock::now();
    if (k == 0) {
      current = solver.initial_solve(x);
    } else {
      const Plan warm = solver.make_warm_start(current, x);
      current = solver.improve(x, warm);
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);

    StepRecord rec;
    rec.k = k;
    rec.state = x;
    rec.input = current.plan.front();
    rec.warm_cost = current.warm_cost;
    rec.cost = current.cost;
    rec.f_evals = current.f_evals;
    rec.cost_evals = current.cost_evals;
    rec.improvements = current.improvements;
    rec.elapsed = elapsed;
    rec.budget_hit = current.budget_hit;
    log.steps.push_back(std::move(rec));

    x = problem.model.step(x, current.plan.front());
  }
  log.final_state = x;
  return log;
}

} // namespace snmpc
