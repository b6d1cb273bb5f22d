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

#include "snmpc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "snmpc/complexity.hpp"

namespace snmpc::bench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON helpers

void require_object(const json &j, const std::string &where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
}

void reject_unknown(const json &j, const std::set<std::string> &known, const std::string &where) {
  for (const auto &item : j.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_real(const json &j, const std::string &key) {
  const json &v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError("'" + key + "' must be a number");
  }
  return v.get<double>();
}

double get_positive(const json &j, const std::string &key) {
  const double v = get_real(j, key);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' must be a positive finite number");
  }
  return v;
}

// Integers built in code are signed even when nonnegative.
bool is_count(const json &v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t get_count(const json &j, const std::string &key) {
  const json &v = j.at(key);
  if (!is_count(v)) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json &j, const std::string &key) {
  const json &v = j.at(key);
  if (!v.is_boolean()) {
    throw ConfigError("'" + key + "' must be true or false");
  }
  return v.get<bool>();
}

std::string get_string(const json &j, const std::string &key) {
  const json &v = j.at(key);
  if (!v.is_string()) {
    throw ConfigError("'" + key + "' must be a string");
  }
  return v.get<std::string>();
}

Eigen::VectorXd get_vector(const json &v, const std::string &what) {
  if (!v.is_array()) {
    throw ConfigError("'" + what + "' must be an array of numbers");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError("'" + what + "' must be an array of numbers");
    }
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    if (!std::isfinite(out[static_cast<Eigen::Index>(i)])) {
      throw ConfigError("'" + what + "' entries must be finite");
    }
  }
  return out;
}

json vector_json(const Eigen::VectorXd &v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Plant parameters

void parse_cart(const json &j, models::CartSpringParams &p) {
  require_object(j, "params");
  reject_unknown(j,
                 {"sample_time", "spring_rho0", "mass", "damping", "input_limit", "position_limit",
                  "terminal_level"},
                 "params (cart_spring)");
  if (j.contains("sample_time")) p.sample_time = get_positive(j, "sample_time");
  if (j.contains("spring_rho0")) p.spring_rho0 = get_positive(j, "spring_rho0");
  if (j.contains("mass")) p.mass = get_positive(j, "mass");
  if (j.contains("damping")) p.damping = get_positive(j, "damping");
  if (j.contains("input_limit")) p.input_limit = get_positive(j, "input_limit");
  if (j.contains("position_limit")) p.position_limit = get_positive(j, "position_limit");
  if (j.contains("terminal_level")) p.terminal_level = get_positive(j, "terminal_level");
}

json cart_json(const models::CartSpringParams &p) {
  return {{"sample_time", p.sample_time},       {"spring_rho0", p.spring_rho0},
          {"mass", p.mass},                     {"damping", p.damping},
          {"input_limit", p.input_limit},       {"position_limit", p.position_limit},
          {"terminal_level", p.terminal_level}};
}

void parse_buck(const json &j, models::BuckBoostParams &p) {
  require_object(j, "params");
  reject_unknown(j,
                 {"inductor_resistance", "capacitance", "inductance", "sample_time",
                  "source_voltage", "load_resistance", "terminal_level", "use_terminal_set"},
                 "params (buck_boost)");
  if (j.contains("inductor_resistance")) p.inductor_resistance = get_positive(j, "inductor_resistance");
  if (j.contains("capacitance")) p.capacitance = get_positive(j, "capacitance");
  if (j.contains("inductance")) p.inductance = get_positive(j, "inductance");
  if (j.contains("sample_time")) p.sample_time = get_positive(j, "sample_time");
  if (j.contains("source_voltage")) p.source_voltage = get_positive(j, "source_voltage");
  if (j.contains("load_resistance")) p.load_resistance = get_positive(j, "load_resistance");
  if (j.contains("terminal_level")) p.terminal_level = get_positive(j, "terminal_level");
  if (j.contains("use_terminal_set")) p.use_terminal_set = get_bool(j, "use_terminal_set");
}

json buck_json(const models::BuckBoostParams &p) {
  return {{"inductor_resistance", p.inductor_resistance},
          {"capacitance", p.capacitance},
          {"inductance", p.inductance},
          {"sample_time", p.sample_time},
          {"source_voltage", p.source_voltage},
          {"load_resistance", p.load_resistance},
          {"terminal_level", p.terminal_level},
          {"use_terminal_set", p.use_terminal_set}};
}

void parse_wmr(const json &j, models::WmrParams &p) {
  require_object(j, "params");
  reject_unknown(j, {"sample_time", "speed_limit", "turn_rate_limit", "obstacle"},
                 "params (wmr)");
  if (j.contains("sample_time")) p.sample_time = get_positive(j, "sample_time");
  if (j.contains("speed_limit")) p.speed_limit = get_positive(j, "speed_limit");
  if (j.contains("turn_rate_limit")) p.turn_rate_limit = get_positive(j, "turn_rate_limit");
  if (j.contains("obstacle")) {
    const json &o = j.at("obstacle");
    if (o.is_null()) {
      p.obstacle.reset();
    } else {
      require_object(o, "obstacle");
      reject_unknown(o, {"center", "radius"}, "obstacle");
      ObstacleSet obs;
      const Eigen::VectorXd c = get_vector(o.at("center"), "obstacle.center");
      if (c.size() != 2) {
        throw ConfigError("'obstacle.center' must have two entries");
      }
      obs.center = c;
      obs.radius = get_positive(o, "radius");
      p.obstacle = obs;
    }
  }
}

json wmr_json(const models::WmrParams &p) {
  json j = {{"sample_time", p.sample_time},
            {"speed_limit", p.speed_limit},
            {"turn_rate_limit", p.turn_rate_limit}};
  if (p.obstacle) {
    j["obstacle"] = {{"center", vector_json(p.obstacle->center)}, {"radius", p.obstacle->radius}};
  } else {
    j["obstacle"] = nullptr;
  }
  return j;
}

SamplerConfig parse_sampler(const json &j, SamplerConfig s) {
  require_object(j, "sampler");
  reject_unknown(j, {"scheme", "seed", "skip", "warp"}, "sampler");
  if (j.contains("scheme")) s.scheme = parse_sampler_scheme(get_string(j, "scheme"));
  if (j.contains("seed")) s.seed = get_count(j, "seed");
  if (j.contains("skip")) s.skip = get_count(j, "skip");
  if (j.contains("warp")) {
    const json &w = j.at("warp");
    if (w.is_null()) {
      s.warp.reset();
    } else {
      require_object(w, "sampler.warp");
      reject_unknown(w, {"exponent", "anchor"}, "sampler.warp");
      DensityWarp warp;
      warp.exponent = get_positive(w, "exponent");
      warp.anchor = get_vector(w.at("anchor"), "sampler.warp.anchor");
      s.warp = warp;
    }
  }
  return s;
}

json sampler_json(const SamplerConfig &s) {
  json j = {{"scheme", to_string(s.scheme)}, {"seed", s.seed}, {"skip", s.skip}};
  if (s.warp) {
    j["warp"] = {{"exponent", s.warp->exponent}, {"anchor", vector_json(s.warp->anchor)}};
  } else {
    j["warp"] = nullptr;
  }
  return j;
}

std::pair<Eigen::Index, Eigen::Index> plant_dims(models::PlantId plant) {
  switch (plant) {
  case models::PlantId::CartSpring:
    return {2, 1};
  case models::PlantId::BuckBoost:
    return {2, 2};
  case models::PlantId::Wmr:
    return {3, 2};
  }
  return {0, 0};
}

void validate_config(const ExperimentConfig &c) {
  const auto [n, m] = plant_dims(c.plant);
  if (c.schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (c.horizon < 1) {
    throw ConfigError("'horizon' must be at least 1");
  }
  if (c.samples_per_step.size() != c.horizon) {
    throw ConfigError("'samples' list must have one entry per horizon step");
  }
  if (c.lanes < 1) {
    throw ConfigError("'lanes' must be at least 1");
  }
  if (c.repeats < 1) {
    throw ConfigError("'repeats' must be at least 1");
  }
  if (c.initial_state.size() != n) {
    throw ConfigError("'initial_state' must have " + std::to_string(n) + " entries");
  }
  if (c.time_budget_ms && !(*c.time_budget_ms >= 0.0)) {
    throw ConfigError("'time_budget_ms' must be nonnegative");
  }
  if (c.sampler.warp && c.sampler.warp->anchor.size() != m) {
    throw ConfigError("'sampler.warp.anchor' must have " + std::to_string(m) + " entries");
  }
  if (c.initial_plan) {
    if (c.initial_plan->size() != c.horizon || c.initial_plan->input_dim() != m) {
      throw ConfigError("'initial_plan' must hold horizon inputs of the plant's input dimension");
    }
  }
  if (c.warm_start_mode == WarmStartMode::Provided && !c.initial_plan) {
    throw ConfigError("warm_start_mode 'provided' needs 'initial_plan'");
  }
  if (c.plant == models::PlantId::Wmr && c.warm_start_mode != WarmStartMode::FeasibleSample) {
    throw ConfigError("the wmr plant has no terminal law; use warm_start_mode 'feasible-sample'");
  }
  if (c.plant == models::PlantId::BuckBoost && !c.buck.use_terminal_set &&
      c.warm_start_mode != WarmStartMode::FeasibleSample) {
    throw ConfigError("buck_boost without a terminal set needs warm_start_mode 'feasible-sample'");
  }
}

// ---------------------------------------------------------------------------
// Output helpers

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

double to_ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

double median(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

json complexity_json(const ExperimentConfig &cfg, const RunLog &log) {
  const CostModel units;
  const ComplexityReport bounds = predicted_bounds(cfg.max_samples(), cfg.horizon, units, cfg.lanes);
  std::uint64_t max_f = 0;
  std::uint64_t max_c = 0;
  bool violation = false;
  for (const auto &s : log.steps) {
    max_f = std::max(max_f, s.f_evals);
    max_c = std::max(max_c, s.cost_evals);
    // The k = 0 step may skip the sweep (improve_initial = false).
    const bool full_sweep = s.k > 0 || cfg.improve_initial;
    if (!cfg.pruning && !s.budget_hit && full_sweep &&
        (s.f_evals != predicted_f_evals(cfg.samples_per_step) ||
         s.cost_evals != predicted_cost_evals(cfg.samples_per_step))) {
      violation = true;
    }
  }
  return {{"units", units.units},
          {"c1", units.c1},
          {"c2", units.c2},
          {"serial_exact", predicted_serial(cfg.samples_per_step, units)},
          {"predicted_f_evals", predicted_f_evals(cfg.samples_per_step)},
          {"predicted_cost_evals", predicted_cost_evals(cfg.samples_per_step)},
          {"serial_bound", bounds.serial_bound},
          {"full_parallel", bounds.full_parallel},
          {"p_parallel", bounds.p_parallel},
          {"max_solve_f_evals", max_f},
          {"max_solve_cost_evals", max_c},
          {"max_solve_ops", static_cast<double>(max_f) + static_cast<double>(max_c)},
          {"counter_violation", violation}};
}

json summary_json(const ExperimentConfig &cfg, const RunLog &log,
                  const std::vector<double> &repeat_totals_ms) {
  std::uint64_t f = 0, c = 0, imp = 0, hits = 0;
  std::vector<double> step_ms;
  for (const auto &s : log.steps) {
    f += s.f_evals;
    c += s.cost_evals;
    imp += s.improvements;
    hits += s.budget_hit ? 1 : 0;
    step_ms.push_back(to_ms(s.elapsed));
  }
  json j = {{"schema_version", kConfigSchemaVersion},
            {"name", cfg.name},
            {"plant", models::to_string(cfg.plant)},
            {"status", "ok"},
            {"termination", log.termination},
            {"steps", log.steps.size()},
            {"horizon", cfg.horizon},
            {"samples_per_step", cfg.samples_per_step},
            {"lanes", cfg.lanes},
            {"pruning", cfg.pruning},
            {"initial_state", vector_json(log.initial_state)},
            {"final_state", vector_json(log.final_state)},
            {"totals",
             {{"f_evals", f},
              {"cost_evals", c},
              {"improvements", imp},
              {"budget_hits", hits},
              {"elapsed_ms", std::accumulate(step_ms.begin(), step_ms.end(), 0.0)},
              {"median_step_ms", median(step_ms)},
              {"max_step_ms", step_ms.empty() ? 0.0 : *std::max_element(step_ms.begin(), step_ms.end())}}},
            {"repeats", cfg.repeats},
            {"repeat_elapsed_ms", repeat_totals_ms},
            {"median_total_elapsed_ms", median(repeat_totals_ms)},
            {"complexity", complexity_json(cfg, log)}};
  if (!log.steps.empty()) {
    j["cost"] = {{"first_J_sub", log.steps.front().cost}, {"last_J_sub", log.steps.back().cost}};
  }
  return j;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

std::size_t ExperimentConfig::max_samples() const {
  return samples_per_step.empty() ? 0
                                  : *std::max_element(samples_per_step.begin(), samples_per_step.end());
}

ExperimentConfig default_config(models::PlantId plant) {
  ExperimentConfig c;
  c.plant = plant;
  c.name = models::to_string(plant);
  switch (plant) {
  case models::PlantId::CartSpring:
    c.horizon = 10;
    c.samples_per_step.assign(10, 10);
    c.sampler.scheme = SamplerScheme::Halton;
    c.steps = 20;
    c.initial_state = Eigen::Vector2d(-2.5, 3.0);
    c.warm_start_mode = WarmStartMode::TerminalController;
    break;
  case models::PlantId::BuckBoost:
    c.horizon = 10;
    c.samples_per_step.assign(10, 10);
    c.sampler.scheme = SamplerScheme::Random;
    c.steps = 100;
    c.initial_state = models::buck_boost_equilibrium_state() + Eigen::Vector2d(1.0, 2.0);
    c.warm_start_mode = WarmStartMode::TerminalController;
    break;
  case models::PlantId::Wmr:
    c.horizon = 5;
    c.samples_per_step.assign(5, 30);
    c.sampler.scheme = SamplerScheme::Random;
    c.steps = 400;
    c.initial_state = Eigen::Vector3d(0.0, 6.0, 0.0);
    c.warm_start_mode = WarmStartMode::FeasibleSample;
    break;
  }
  c.sampler.seed = 1;
  return c;
}

ExperimentConfig parse_config(const json &j) {
  try {
    require_object(j, "config");
    reject_unknown(j,
                   {"schema_version", "name", "plant", "horizon", "samples", "sampler", "lanes",
                    "steps", "initial_state", "time_budget_ms", "pruning", "oracle_budget",
                    "warm_start_mode", "warm_start_budget", "improve_initial", "initial_plan",
                    "repeats", "record_timing", "output_dir", "params"},
                   "config");
    if (!j.contains("plant")) {
      throw ConfigError("config: 'plant' is required");
    }
    ExperimentConfig c = default_config(models::parse_plant(get_string(j, "plant")));
    const std::size_t default_samples = c.max_samples();

    if (j.contains("schema_version")) c.schema_version = static_cast<int>(get_count(j, "schema_version"));
    if (j.contains("name")) c.name = get_string(j, "name");
    if (j.contains("horizon")) c.horizon = get_count(j, "horizon");
    if (j.contains("samples")) {
      const json &s = j.at("samples");
      if (is_count(s)) {
        c.samples_per_step.assign(c.horizon, s.get<std::size_t>());
      } else if (s.is_array()) {
        c.samples_per_step.clear();
        for (const auto &v : s) {
          if (!is_count(v)) {
            throw ConfigError("'samples' entries must be nonnegative integers");
          }
          c.samples_per_step.push_back(v.get<std::size_t>());
        }
      } else {
        throw ConfigError("'samples' must be an integer or a list of integers");
      }
    } else {
      c.samples_per_step.assign(c.horizon, default_samples);
    }
    if (j.contains("sampler")) c.sampler = parse_sampler(j.at("sampler"), c.sampler);
    if (j.contains("lanes")) c.lanes = get_count(j, "lanes");
    if (j.contains("steps")) c.steps = get_count(j, "steps");
    if (j.contains("initial_state")) c.initial_state = get_vector(j.at("initial_state"), "initial_state");
    if (j.contains("time_budget_ms")) {
      if (j.at("time_budget_ms").is_null()) {
        c.time_budget_ms.reset();
      } else {
        c.time_budget_ms = get_real(j, "time_budget_ms");
      }
    }
    if (j.contains("pruning")) c.pruning = get_bool(j, "pruning");
    if (j.contains("oracle_budget")) c.oracle_budget = get_count(j, "oracle_budget");
    if (j.contains("warm_start_mode")) c.warm_start_mode = parse_warm_start_mode(get_string(j, "warm_start_mode"));
    if (j.contains("warm_start_budget")) c.warm_start_budget = get_count(j, "warm_start_budget");
    if (j.contains("improve_initial")) c.improve_initial = get_bool(j, "improve_initial");
    if (j.contains("initial_plan")) {
      const json &p = j.at("initial_plan");
      if (p.is_null()) {
        c.initial_plan.reset();
      } else if (p.is_array()) {
        std::vector<InputVec> inputs;
        for (const auto &u : p) {
          inputs.push_back(get_vector(u, "initial_plan"));
        }
        c.initial_plan = Plan(std::move(inputs));
      } else {
        throw ConfigError("'initial_plan' must be a list of input vectors or null");
      }
    }
    if (j.contains("repeats")) c.repeats = get_count(j, "repeats");
    if (j.contains("record_timing")) c.record_timing = get_bool(j, "record_timing");
    if (j.contains("output_dir")) c.output_dir = get_string(j, "output_dir");
    if (j.contains("params")) {
      switch (c.plant) {
      case models::PlantId::CartSpring:
        parse_cart(j.at("params"), c.cart);
        break;
      case models::PlantId::BuckBoost:
        parse_buck(j.at("params"), c.buck);
        break;
      case models::PlantId::Wmr:
        parse_wmr(j.at("params"), c.wmr);
        break;
      }
    }
    validate_config(c);
    return c;
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(e.what());
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig &c) {
  json j = {{"schema_version", c.schema_version},
            {"name", c.name},
            {"plant", models::to_string(c.plant)},
            {"horizon", c.horizon},
            {"samples", c.samples_per_step},
            {"sampler", sampler_json(c.sampler)},
            {"lanes", c.lanes},
            {"steps", c.steps},
            {"initial_state", vector_json(c.initial_state)},
            {"pruning", c.pruning},
            {"oracle_budget", c.oracle_budget},
            {"warm_start_mode", to_string(c.warm_start_mode)},
            {"warm_start_budget", c.warm_start_budget},
            {"improve_initial", c.improve_initial},
            {"repeats", c.repeats},
            {"record_timing", c.record_timing},
            {"output_dir", c.output_dir}};
  j["time_budget_ms"] = c.time_budget_ms ? json(*c.time_budget_ms) : json(nullptr);
  if (c.initial_plan) {
    json plan = json::array();
    for (const auto &u : *c.initial_plan) {
      plan.push_back(vector_json(u));
    }
    j["initial_plan"] = plan;
  } else {
    j["initial_plan"] = nullptr;
  }
  switch (c.plant) {
  case models::PlantId::CartSpring:
    j["params"] = cart_json(c.cart);
    break;
  case models::PlantId::BuckBoost:
    j["params"] = buck_json(c.buck);
    break;
  case models::PlantId::Wmr:
    j["params"] = wmr_json(c.wmr);
    break;
  }
  return j;
}

Problem make_problem(const ExperimentConfig &cfg) {
  switch (cfg.plant) {
  case models::PlantId::CartSpring:
    return models::cart_spring_problem(cfg.horizon, cfg.cart);
  case models::PlantId::BuckBoost:
    return models::buck_boost_problem(cfg.horizon, cfg.buck);
  case models::PlantId::Wmr:
    return models::wmr_problem(cfg.horizon, cfg.wmr);
  }
  throw ConfigError("unknown plant");
}

SolverConfig make_solver_config(const ExperimentConfig &cfg) {
  SolverConfig s;
  s.horizon = cfg.horizon;
  s.samples_per_step = cfg.samples_per_step;
  s.sampler = cfg.sampler;
  s.lanes = cfg.lanes;
  if (cfg.time_budget_ms) {
    s.time_budget = std::chrono::nanoseconds(static_cast<std::int64_t>(*cfg.time_budget_ms * 1e6));
  }
  s.pruning = cfg.pruning;
  s.oracle_budget = cfg.oracle_budget;
  s.warm_start_mode = cfg.warm_start_mode;
  s.warm_start_budget = cfg.warm_start_budget;
  s.improve_initial = cfg.improve_initial;
  s.initial_plan = cfg.initial_plan;
  return s;
}

std::string format_steps_csv(const RunLog &log, bool record_timing) {
  const Eigen::Index n = log.initial_state.size();
  const Eigen::Index m = log.input_dim;
  std::ostringstream os;
  os << "k";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i;
  os << ",J_sub,f_evals,cost_evals,elapsed_ms,budget_hit,J_warm,improvements\n";
  for (const auto &s : log.steps) {
    os << s.k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << fmt_real(s.state[i]);
    for (Eigen::Index i = 0; i < m; ++i) os << ',' << fmt_real(s.input[i]);
    os << ',' << fmt_real(s.cost) << ',' << s.f_evals << ',' << s.cost_evals << ','
       << fmt_real(record_timing ? to_ms(s.elapsed) : 0.0) << ',' << (s.budget_hit ? 1 : 0) << ','
       << fmt_real(s.warm_cost) << ',' << s.improvements << '\n';
  }
  return os.str();
}

int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const ConfigError *>(&e) != nullptr ||
      dynamic_cast<const ContractViolation *>(&e) != nullptr) {
    return 2;
  }
  if (dynamic_cast<const NoOracle *>(&e) != nullptr ||
      dynamic_cast<const WarmStartFailure *>(&e) != nullptr ||
      dynamic_cast<const RejectedInput *>(&e) != nullptr) {
    return 3;
  }
  return 4;
}

std::string error_kind(const std::exception &e) {
  if (dynamic_cast<const ConfigError *>(&e) != nullptr) return "config-error";
  if (dynamic_cast<const ContractViolation *>(&e) != nullptr) return "contract-violation";
  if (dynamic_cast<const NoOracle *>(&e) != nullptr) return "no-oracle";
  if (dynamic_cast<const WarmStartFailure *>(&e) != nullptr) return "warm-start-failure";
  if (dynamic_cast<const RejectedInput *>(&e) != nullptr) return "rejected-input";
  return "runtime-error";
}

RunArtifacts run_experiment(const ExperimentConfig &cfg, const fs::path &out_dir) {
  fs::create_directories(out_dir);
  RunArtifacts art{out_dir / "steps.csv", out_dir / "summary.json", out_dir / "config.resolved.json"};
  write_text(art.resolved_config, to_json(cfg).dump(2) + "\n");
  try {
    const Problem problem = make_problem(cfg);
    const SolverConfig solver_cfg = make_solver_config(cfg);
    RunLog first;
    std::vector<double> totals;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      RunLog log = closed_loop(problem, solver_cfg, cfg.initial_state, cfg.steps);
      totals.push_back(to_ms(std::chrono::steady_clock::now() - t0));
      if (r == 0) {
        first = std::move(log);
      }
    }
    write_text(art.steps_csv, format_steps_csv(first, cfg.record_timing));
    write_text(art.summary_json, summary_json(cfg, first, totals).dump(2) + "\n");
    std::error_code ec;
    fs::remove(out_dir / "error.json", ec);
    return art;
  } catch (const std::exception &e) {
    const json err = {{"status", "error"},
                      {"kind", error_kind(e)},
                      {"message", e.what()},
                      {"exit_code", exit_code_for(e)}};
    write_text(out_dir / "error.json", err.dump(2) + "\n");
    throw;
  }
}

std::vector<ExperimentConfig> parse_sweep(const json &j) {
  try {
    require_object(j, "sweep");
    reject_unknown(j, {"schema_version", "configs", "base", "horizons", "samples"}, "sweep");
    if (j.contains("schema_version") && get_count(j, "schema_version") != kConfigSchemaVersion) {
      throw ConfigError("sweep: unsupported schema_version");
    }
    std::vector<ExperimentConfig> out;
    if (j.contains("configs")) {
      if (j.contains("base")) {
        throw ConfigError("sweep: give either 'configs' or 'base', not both");
      }
      if (!j.at("configs").is_array()) {
        throw ConfigError("sweep: 'configs' must be a list");
      }
      for (const auto &c : j.at("configs")) {
        out.push_back(parse_config(c));
      }
      return out;
    }
    if (!j.contains("base")) {
      throw ConfigError("sweep: needs 'configs' or 'base'");
    }
    const json base = j.at("base");
    require_object(base, "sweep.base");
    auto counts = [&](const char *key) -> std::vector<std::optional<std::uint64_t>> {
      if (!j.contains(key)) {
        return {std::nullopt};
      }
      if (!j.at(key).is_array() || j.at(key).empty()) {
        throw ConfigError(std::string("sweep: '") + key + "' must be a nonempty list");
      }
      std::vector<std::optional<std::uint64_t>> v;
      for (const auto &x : j.at(key)) {
        if (!is_count(x)) {
          throw ConfigError(std::string("sweep: '") + key + "' entries must be nonnegative integers");
        }
        v.emplace_back(x.get<std::uint64_t>());
      }
      return v;
    };
    const ExperimentConfig resolved_base = parse_config(base);
    std::size_t index = 0;
    for (const auto &h : counts("horizons")) {
      for (const auto &s : counts("samples")) {
        json entry = base;
        if (h) {
          entry["horizon"] = *h;
        }
        if (s) {
          entry["samples"] = *s;
        } else if (h) {
          entry["samples"] = resolved_base.max_samples();
        }
        ExperimentConfig c = parse_config(entry);
        c.sampler.seed = resolved_base.sampler.seed + index;
        c.name = resolved_base.name + "_N" + std::to_string(c.horizon) + "_n" +
                 std::to_string(c.max_samples());
        out.push_back(std::move(c));
        ++index;
      }
    }
    return out;
  } catch (const ConfigError &) {
    throw;
  } catch (const json::exception &e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
}

SweepArtifacts sweep(const std::vector<ExperimentConfig> &configs, const fs::path &out_dir) {
  if (configs.empty()) {
    throw ConfigError("sweep: empty config list");
  }
  fs::create_directories(out_dir);
  SweepArtifacts result;
  std::ostringstream csv;
  csv << "config_id,name,plant,N,n_bar,lanes,pruning,steps,status,total_elapsed_ms,"
         "median_step_ms,max_solve_f_evals,max_solve_cost_evals,max_solve_ops,serial_exact,"
         "serial_bound,full_parallel,p_parallel\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig &cfg = configs[i];
    SweepEntry entry;
    entry.config = cfg;
    const fs::path dir = out_dir / (std::to_string(i) + "_" + cfg.name);
    try {
      entry.artifacts = run_experiment(cfg, dir);
      std::ifstream in(entry.artifacts->summary_json);
      entry.summary = json::parse(in);
    } catch (const std::exception &e) {
      entry.status = error_kind(e);
    }
    const ComplexityReport bounds = predicted_bounds(cfg.max_samples(), cfg.horizon, {}, cfg.lanes);
    csv << i << ',' << cfg.name << ',' << models::to_string(cfg.plant) << ',' << cfg.horizon << ','
        << cfg.max_samples() << ',' << cfg.lanes << ',' << (cfg.pruning ? 1 : 0) << ','
        << cfg.steps << ',' << entry.status << ',';
    if (entry.artifacts) {
      const json &s = entry.summary;
      csv << fmt_real(s["median_total_elapsed_ms"].get<double>()) << ','
          << fmt_real(s["totals"]["median_step_ms"].get<double>()) << ','
          << s["complexity"]["max_solve_f_evals"].get<std::uint64_t>() << ','
          << s["complexity"]["max_solve_cost_evals"].get<std::uint64_t>() << ','
          << fmt_real(s["complexity"]["max_solve_ops"].get<double>()) << ',';
    } else {
      csv << ",,,,,";
    }
    csv << fmt_real(predicted_serial(cfg.samples_per_step, {})) << ','
        << fmt_real(bounds.serial_bound) << ',' << fmt_real(bounds.full_parallel) << ','
        << fmt_real(bounds.p_parallel) << '\n';
    result.entries.push_back(std::move(entry));
  }
  result.sweep_csv = out_dir / "sweep.csv";
  write_text(result.sweep_csv, csv.str());
  return result;
}

LogValidation validate_log(const ExperimentConfig &cfg, const fs::path &steps_csv) {
  std::ifstream in(steps_csv);
  if (!in) {
    throw ConfigError("cannot open log " + steps_csv.string());
  }
  const Problem problem = make_problem(cfg);
  const Eigen::Index n = problem.model.n;
  const Eigen::Index m = problem.model.m;

  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("log " + steps_csv.string() + " is empty");
  }
  const auto header = split_csv_line(line);
  if (header.size() < static_cast<std::size_t>(1 + n + m) || header[0] != "k") {
    throw ConfigError("log header does not match the plant dimensions");
  }

  LogValidation report;
  std::optional<std::pair<StateVec, InputVec>> previous;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError("log row " + std::to_string(report.rows) + " has the wrong column count");
    }
    StateVec x(n);
    InputVec u(m);
    try {
      for (Eigen::Index i = 0; i < n; ++i) x[i] = std::stod(cells[static_cast<std::size_t>(1 + i)]);
      for (Eigen::Index i = 0; i < m; ++i) u[i] = std::stod(cells[static_cast<std::size_t>(1 + n + i)]);
    } catch (const std::exception &) {
      throw ConfigError("log row " + std::to_string(report.rows) + " has a malformed number");
    }
    const std::size_t row = report.rows++;
    if (!problem.constraints.state_box.contains(x)) {
      report.violations.push_back({row, "state outside the state box"});
    }
    for (const auto &o : problem.constraints.obstacles) {
      if (!o.admits(x)) {
        report.violations.push_back({row, "state inside an obstacle"});
      }
    }
    if (!problem.constraints.input_box.contains(u)) {
      report.violations.push_back({row, "input outside the input box"});
    }
    if (previous) {
      const StateVec expected = problem.model.step(previous->first, previous->second);
      if (expected != x) {
        report.violations.push_back({row, "state does not follow from the previous row"});
      }
    }
    previous = std::make_pair(x, u);
  }
  return report;
}

} // namespace snmpc::bench
