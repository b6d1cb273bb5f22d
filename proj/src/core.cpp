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

#include "snmpc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace snmpc {
namespace {

constexpr double kSymmetryTol = 1e-12;

void require(bool condition, const char *what) {
  if (!condition) {
    throw ContractViolation(what);
  }
}

std::string dim_message(const char *what, Eigen::Index got, Eigen::Index want) {
  std::ostringstream os;
  os << what << ": got dimension " << got << ", expected " << want;
  return os.str();
}

void require_dim(Eigen::Index got, Eigen::Index want, const char *what) {
  if (got != want) {
    throw ContractViolation(dim_message(what, got, want));
  }
}

bool is_symmetric(const Matrix &M) {
  return M.rows() == M.cols() && (M - M.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol;
}

void require_square(const Matrix &M, Eigen::Index dim, const char *what) {
  require_dim(M.rows(), dim, what);
  require_dim(M.cols(), dim, what);
  require(is_symmetric(M), what);
}

bool positive_definite(const Matrix &M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
}

bool positive_semidefinite(const Matrix &M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= -1e-12;
}

} // namespace

// ---------------------------------------------------------------------------
// Plan

Plan::Plan(std::vector<InputVec> inputs) : inputs_(std::move(inputs)) {
  for (const auto &u : inputs_) {
    require_dim(u.size(), inputs_.front().size(), "Plan: inconsistent input dimension");
  }
}

Plan::Plan(std::size_t horizon, const InputVec &u) : inputs_(horizon, u) {}

bool operator==(const Plan &a, const Plan &b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size() || a[i] != b[i]) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// PlantModel

void PlantModel::validate(double tol) const {
  require(n > 0 && m > 0, "PlantModel: dimensions must be positive");
  require(static_cast<bool>(step), "PlantModel: missing step map");
  require_dim(equilibrium_state.size(), n, "PlantModel: equilibrium state");
  require_dim(equilibrium_input.size(), m, "PlantModel: equilibrium input");
  const StateVec next = step(equilibrium_state, equilibrium_input);
  require_dim(next.size(), n, "PlantModel: step output");
  if ((next - equilibrium_state).cwiseAbs().maxCoeff() > tol) {
    throw ContractViolation("PlantModel: equilibrium is not a fixed point of the step map");
  }
}

// ---------------------------------------------------------------------------
// Sets

BoxSet BoxSet::unbounded(Eigen::Index dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Eigen::VectorXd::Constant(dim, -inf), Eigen::VectorXd::Constant(dim, inf)};
}

bool BoxSet::contains(const Eigen::VectorXd &v) const {
  require_dim(v.size(), dim(), "BoxSet::contains");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // Written so that NaN never passes.
    if (!(v[i] >= lower[i] && v[i] <= upper[i])) {
      return false;
    }
  }
  return true;
}

bool BoxSet::bounded() const {
  return lower.allFinite() && upper.allFinite();
}

void BoxSet::validate() const {
  require_dim(upper.size(), lower.size(), "BoxSet: lower/upper");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    require(!std::isnan(lower[i]) && !std::isnan(upper[i]), "BoxSet: NaN bound");
    require(lower[i] <= upper[i], "BoxSet: lower > upper");
  }
}

double EllipsoidSet::value(const StateVec &x) const {
  require_dim(x.size(), center.size(), "EllipsoidSet::value");
  const StateVec d = x - center;
  return d.dot(shape * d);
}

void EllipsoidSet::validate() const {
  require_square(shape, center.size(), "EllipsoidSet: shape must be symmetric n x n");
  require(positive_definite(shape), "EllipsoidSet: shape must be positive definite");
  require(level > 0.0, "EllipsoidSet: level must be positive");
}

bool ObstacleSet::admits(const StateVec &x) const {
  const double da = x[index_a] - center[0];
  const double db = x[index_b] - center[1];
  return da * da + db * db >= radius * radius;
}

void ObstacleSet::validate(Eigen::Index state_dim) const {
  require(radius > 0.0, "ObstacleSet: radius must be positive");
  require(index_a >= 0 && index_a < state_dim && index_b >= 0 && index_b < state_dim &&
              index_a != index_b,
          "ObstacleSet: position indices out of range");
}

bool ConstraintSpec::state_admissible(const StateVec &x) const {
  if (!state_box.contains(x)) {
    return false;
  }
  return std::all_of(obstacles.begin(), obstacles.end(),
                     [&](const ObstacleSet &o) { return o.admits(x); });
}

bool ConstraintSpec::terminal_admissible(const StateVec &x) const {
  return !terminal || terminal->contains(x);
}

void ConstraintSpec::validate(const PlantModel &model) const {
  state_box.validate();
  input_box.validate();
  require_dim(state_box.dim(), model.n, "ConstraintSpec: state box");
  require_dim(input_box.dim(), model.m, "ConstraintSpec: input box");
  for (const auto &o : obstacles) {
    o.validate(model.n);
  }
  if (terminal) {
    require_dim(terminal->center.size(), model.n, "ConstraintSpec: terminal set");
    terminal->validate();
  }
}

// ---------------------------------------------------------------------------
// CostSpec

CostSpec CostSpec::constant(std::size_t horizon, const Matrix &Q, const Matrix &R,
                            const Matrix &P, const StateVec &x_ref, const InputVec &u_ref) {
  return {std::vector<Matrix>(horizon, Q), std::vector<Matrix>(horizon, R), P, x_ref, u_ref};
}

double CostSpec::stage(std::size_t j, const StateVec &x, const InputVec &u) const {
  const StateVec dx = x - state_ref;
  const InputVec du = u - input_ref;
  return dx.dot(stage_state_weights[j] * dx) + du.dot(stage_input_weights[j] * du);
}

double CostSpec::terminal(const StateVec &x) const {
  const StateVec dx = x - state_ref;
  return dx.dot(terminal_weight * dx);
}

void CostSpec::validate(const PlantModel &model) const {
  require(!stage_state_weights.empty(), "CostSpec: horizon must be at least 1");
  require(stage_input_weights.size() == stage_state_weights.size(),
          "CostSpec: Q_j and R_j lists differ in length");
  require_dim(state_ref.size(), model.n, "CostSpec: state reference");
  require_dim(input_ref.size(), model.m, "CostSpec: input reference");
  for (const auto &Q : stage_state_weights) {
    require_square(Q, model.n, "CostSpec: Q_j must be symmetric n x n");
    require(positive_semidefinite(Q), "CostSpec: Q_j must be positive semidefinite");
  }
  for (const auto &R : stage_input_weights) {
    require_square(R, model.m, "CostSpec: R_j must be symmetric m x m");
    require(positive_definite(R), "CostSpec: R_j must be positive definite");
  }
  require_square(terminal_weight, model.n, "CostSpec: P must be symmetric n x n");
  require(positive_definite(terminal_weight), "CostSpec: P must be positive definite");
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
  case ViolationKind::InputBound:
    return "input-bound";
  case ViolationKind::StateBox:
    return "state-box";
  case ViolationKind::Obstacle:
    return "obstacle";
  case ViolationKind::Terminal:
    return "terminal";
  }
  return "unknown";
}

void Problem::validate() const {
  model.validate();
  constraints.validate(model);
  cost.validate(model);
}

// ---------------------------------------------------------------------------
// Operations

Trajectory rollout(const PlantModel &model, const StateVec &x0, const Plan &plan) {
  require_dim(x0.size(), model.n, "rollout: initial state");
  Trajectory traj;
  traj.states.reserve(plan.size() + 1);
  traj.states.push_back(x0);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    require_dim(plan[i].size(), model.m, "rollout: input");
    traj.states.push_back(model.step(traj.states.back(), plan[i]));
  }
  return traj;
}

double evaluate_cost(const CostSpec &cost, const Trajectory &traj, const Plan &plan) {
  if (traj.size() != plan.size() + 1) {
    throw ContractViolation("evaluate_cost: trajectory length must be plan length + 1");
  }
  if (plan.size() != cost.horizon()) {
    throw ContractViolation(dim_message("evaluate_cost: plan length", plan.size(), cost.horizon()));
  }
  require_dim(traj[0].size(), cost.state_ref.size(), "evaluate_cost: state");
  double total = 0.0;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    require_dim(plan[j].size(), cost.input_ref.size(), "evaluate_cost: input");
    total += cost.stage(j, traj[j], plan[j]);
  }
  return total + cost.terminal(traj.back());
}

FeasibilityReport check_feasible(const ConstraintSpec &constraints, const Trajectory &traj,
                                 const Plan &plan, std::size_t from_index) {
  const std::size_t N = plan.size();
  if (traj.size() != N + 1) {
    throw ContractViolation("check_feasible: trajectory length must be plan length + 1");
  }
  if (from_index > N) {
    throw ContractViolation("check_feasible: from_index beyond horizon");
  }
  const std::size_t first_input = from_index == 0 ? 0 : from_index - 1;
  auto fail = [](std::size_t i, ViolationKind kind) {
    return FeasibilityReport{false, i, kind};
  };
  for (std::size_t i = first_input; i <= N; ++i) {
    if (i < N && !constraints.input_admissible(plan[i])) {
      return fail(i, ViolationKind::InputBound);
    }
    if (i < from_index) {
      continue;
    }
    if (!constraints.state_box.contains(traj[i])) {
      return fail(i, ViolationKind::StateBox);
    }
    for (const auto &o : constraints.obstacles) {
      if (!o.admits(traj[i])) {
        return fail(i, ViolationKind::Obstacle);
      }
    }
    if (i == N && !constraints.terminal_admissible(traj[i])) {
      return fail(i, ViolationKind::Terminal);
    }
  }
  return {};
}

Plan shift_plan(const Plan &prev, const InputVec &appended) {
  if (prev.empty()) {
    throw ContractViolation("shift_plan: empty plan");
  }
  require_dim(appended.size(), prev.input_dim(), "shift_plan: appended input");
  std::vector<InputVec> inputs(prev.begin() + 1, prev.end());
  inputs.push_back(appended);
  return Plan(std::move(inputs));
}

} // namespace snmpc
