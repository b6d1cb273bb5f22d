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

#ifndef SNMPC_EXPERIMENT_HPP
#define SNMPC_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "snmpc/models.hpp"
#include "snmpc/solver.hpp"

namespace snmpc::bench {

inline constexpr int kConfigSchemaVersion = 1;

/// One closed-loop experiment. Missing fields in the JSON form take the
/// plant's published defaults; to_json() always writes every field.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name;
  models::PlantId plant = models::PlantId::CartSpring;
  std::size_t horizon = 10;
  std::vector<std::size_t> samples_per_step;
  SamplerConfig sampler;
  std::size_t lanes = 1;
  std::size_t steps = 20;
  StateVec initial_state;
  std::optional<double> time_budget_ms;
  bool pruning = true;
  std::size_t oracle_budget = 1'000'000;
  WarmStartMode warm_start_mode = WarmStartMode::TerminalController;
  std::size_t warm_start_budget = 10'000;
  bool improve_initial = true;
  std::optional<Plan> initial_plan;
  std::size_t repeats = 1;
  /// When false the elapsed_ms column is written as 0 so that logs compare byte for byte.
  bool record_timing = true;
  std::string output_dir;

  models::CartSpringParams cart;
  models::BuckBoostParams buck;
  models::WmrParams wmr;

  std::size_t max_samples() const;
};

/// Throws ConfigError on unknown keys, wrong types or out-of-range values.
ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig load_config(const std::filesystem::path &path);
nlohmann::json to_json(const ExperimentConfig &cfg);

/// Default configuration of a plant's benchmark run.
ExperimentConfig default_config(models::PlantId plant);

Problem make_problem(const ExperimentConfig &cfg);
SolverConfig make_solver_config(const ExperimentConfig &cfg);

struct RunArtifacts {
  std::filesystem::path steps_csv;
  std::filesystem::path summary_json;
  std::filesystem::path resolved_config;
};

/// CSV of the per-step log; numbers carry 17 significant digits.
std::string format_steps_csv(const RunLog &log, bool record_timing);

/// Runs the closed loop and writes steps.csv, summary.json and
/// config.resolved.json into `out_dir`. On failure writes error.json and
/// rethrows.
RunArtifacts run_experiment(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

struct SweepEntry {
  ExperimentConfig config;
  std::optional<RunArtifacts> artifacts;
  std::string status = "ok";
  nlohmann::json summary;
};

struct SweepArtifacts {
  std::vector<SweepEntry> entries;
  std::filesystem::path sweep_csv;
};

/// Accepts {"configs": [...]} or {"base": {...}, "horizons": [...], "samples": [...]};
/// expanded entries get seed = base seed + index.
std::vector<ExperimentConfig> parse_sweep(const nlohmann::json &j);

/// Runs every config in its own subdirectory, sequentially; a failing entry is
/// recorded and the sweep continues. Throws ConfigError on an empty list.
SweepArtifacts sweep(const std::vector<ExperimentConfig> &configs,
                     const std::filesystem::path &out_dir);

struct LogViolation {
  std::size_t row = 0;
  std::string reason;
};

struct LogValidation {
  std::size_t rows = 0;
  std::vector<LogViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-checks a steps.csv against the plant's state/input constraints and the
/// plant map between consecutive rows.
LogValidation validate_log(const ExperimentConfig &cfg, const std::filesystem::path &steps_csv);

/// Process exit code for an exception escaping a run: 2 config, 3 infeasibility, 4 runtime.
int exit_code_for(const std::exception &e);
std::string error_kind(const std::exception &e);

} // namespace snmpc::bench

#endif // SNMPC_EXPERIMENT_HPP
