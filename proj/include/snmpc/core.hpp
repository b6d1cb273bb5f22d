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

#ifndef SNMPC_CORE_HPP
#define SNMPC_CORE_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snmpc/errors.hpp"

namespace snmpc {

using StateVec = Eigen::VectorXd;
using InputVec = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered sequence of N inputs, the object the solver improves.
class Plan {
public:
  Plan() = default;
  explicit Plan(std::vector<InputVec> inputs);
  /// N copies of `u`.
  Plan(std::size_t horizon, const InputVec &u);

  std::size_t size() const { return inputs_.size(); }
  bool empty() const { return inputs_.empty(); }
  Eigen::Index input_dim() const { return inputs_.empty() ? 0 : inputs_.front().size(); }

  const InputVec &operator[](std::size_t i) const { return inputs_[i]; }
  InputVec &operator[](std::size_t i) { return inputs_[i]; }
  const InputVec &front() const { return inputs_.front(); }
  const InputVec &back() const { return inputs_.back(); }

  const std::vector<InputVec> &inputs() const { return inputs_; }

  auto begin() const { return inputs_.begin(); }
  auto end() const { return inputs_.end(); }

  friend bool operator==(const Plan &a, const Plan &b);

private:
  std::vector<InputVec> inputs_;
};

/// Predicted states; states[i] is the state after i inputs of a plan.
struct Trajectory {
  std::vector<StateVec> states;

  std::size_t size() const { return states.size(); }
  const StateVec &operator[](std::size_t i) const { return states[i]; }
  const StateVec &back() const { return states.back(); }
};

/// Discrete-time plant x+ = step(x, u) together with the equilibrium it regulates to.
struct PlantModel {
  std::string name;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::function<StateVec(const StateVec &, const InputVec &)> step;
  StateVec equilibrium_state;
  InputVec equilibrium_input;

  /// Throws ContractViolation if the model is incomplete or the equilibrium is
  /// not a fixed point to within `tol` per coordinate.
  void validate(double tol = 1e-9) const;
};

/// Per-coordinate closed bounds; infinite entries mean unbounded.
struct BoxSet {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static BoxSet unbounded(Eigen::Index dim);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Eigen::VectorXd &v) const;
  bool bounded() const;
  void validate() const;
};

/// {x | (x - center)' shape (x - center) <= level}
struct EllipsoidSet {
  StateVec center;
  Matrix shape;
  double level = 0.0;

  double value(const StateVec &x) const;
  bool contains(const StateVec &x) const { return value(x) <= level; }
  void validate() const;
};

/// Disc excluded from the plane spanned by two state coordinates.
struct ObstacleSet {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  Eigen::Index index_a = 0;
  Eigen::Index index_b = 1;

  /// True when x lies outside (or on the rim of) the disc.
  bool admits(const StateVec &x) const;
  void validate(Eigen::Index state_dim) const;
};

struct ConstraintSpec {
  BoxSet state_box;
  BoxSet input_box;
  std::vector<ObstacleSet> obstacles;
  std::optional<EllipsoidSet> terminal;

  bool state_admissible(const StateVec &x) const;
  bool input_admissible(const InputVec &u) const { return input_box.contains(u); }
  bool terminal_admissible(const StateVec &x) const;

  void validate(const PlantModel &model) const;
};

/// Quadratic stage and terminal weights around a reference (x_ref, u_ref).
struct CostSpec {
  std::vector<Matrix> stage_state_weights; ///< Q_j, j = 0..N-1
  std::vector<Matrix> stage_input_weights; ///< R_j, j = 0..N-1
  Matrix terminal_weight;                  ///< P
  StateVec state_ref;
  InputVec input_ref;

  /// Constant Q_j = Q, R_j = R over the horizon.
  static CostSpec constant(std::size_t horizon, const Matrix &Q, const Matrix &R, const Matrix &P,
                           const StateVec &x_ref, const InputVec &u_ref);

  std::size_t horizon() const { return stage_state_weights.size(); }

  double stage(std::size_t j, const StateVec &x, const InputVec &u) const;
  double terminal(const StateVec &x) const;

  void validate(const PlantModel &model) const;
};

enum class ViolationKind { InputBound, StateBox, Obstacle, Terminal };

std::string to_string(ViolationKind kind);

struct FeasibilityReport {
  bool feasible = true;
  std::optional<std::size_t> violation_index;
  std::optional<ViolationKind> violation_kind;
};

/// The triple every solver call works against.
struct Problem {
  PlantModel model;
  ConstraintSpec constraints;
  CostSpec cost;
  /// Terminal feedback law k_f, when the plant has one.
  std::function<InputVec(const StateVec &)> terminal_law;

  std::size_t horizon() const { return cost.horizon(); }
  void validate() const;
};

Trajectory rollout(const PlantModel &model, const StateVec &x0, const Plan &plan);

double evaluate_cost(const CostSpec &cost, const Trajectory &traj, const Plan &plan);

/// Checks inputs plan[i] for i >= max(from_index - 1, 0), states traj[i] for
/// i in [from_index, N] against the state constraints and traj[N] against the
/// terminal set. Reports the first violation in horizon order.
FeasibilityReport check_feasible(const ConstraintSpec &constraints, const Trajectory &traj,
                                 const Plan &plan, std::size_t from_index = 0);

/// {prev[1], ..., prev[N-1], appended}
Plan shift_plan(const Plan &prev, const InputVec &appended);

} // namespace snmpc

#endif // SNMPC_CORE_HPP
