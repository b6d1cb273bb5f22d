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

#include "snmpc/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace snmpc::models {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dims(const StateVec &x, Eigen::Index n, const InputVec &u, Eigen::Index m,
                  const char *who) {
  if (x.size() != n || u.size() != m) {
    throw ContractViolation(std::string(who) + ": dimension mismatch");
  }
}

Matrix diag(std::initializer_list<double> values) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    d[i++] = v;
  }
  return d.asDiagonal();
}

} // namespace

std::string to_string(PlantId plant) {
  switch (plant) {
  case PlantId::CartSpring:
    return "cart_spring";
  case PlantId::BuckBoost:
    return "buck_boost";
  case PlantId::Wmr:
    return "wmr";
  }
  return "unknown";
}

PlantId parse_plant(const std::string &name) {
  if (name == "cart_spring") {
    return PlantId::CartSpring;
  }
  if (name == "buck_boost") {
    return PlantId::BuckBoost;
  }
  if (name == "wmr") {
    return PlantId::Wmr;
  }
  throw ConfigError("unknown plant '" + name + "' (expected cart_spring, buck_boost or wmr)");
}

// ---------------------------------------------------------------------------
// Cart-spring

StateVec cart_spring_drift(const CartSpringParams &p, const StateVec &x) {
  if (x.size() != 2) {
    throw ContractViolation("cart_spring_drift: dimension mismatch");
  }
  const double ts = p.sample_time;
  StateVec next(2);
  next[0] = x[0] + ts * x[1];
  next[1] = x[1] - ts * (p.spring_rho0 / p.mass) * std::exp(-x[0]) * x[0] -
            ts * (p.damping / p.mass) * x[1];
  return next;
}

StateVec cart_spring_step(const CartSpringParams &p, const StateVec &x, const InputVec &u) {
  require_dims(x, 2, u, 1, "cart_spring_step");
  StateVec next = cart_spring_drift(p, x);
  next[1] += (p.sample_time / p.mass) * u[0];
  return next;
}

InputVec cart_spring_terminal_control(const CartSpringParams &p, const StateVec &x) {
  const StateVec f1 = cart_spring_drift(p, x);
  InputVec u(1);
  u[0] = -(0.8783 * f1[0] + 1.1204 * f1[1]);
  return u;
}

Matrix cart_spring_terminal_weight() {
  Matrix P(2, 2);
  P << 7.0814, 3.3708, 3.3708, 4.2998;
  return P;
}

Matrix cart_spring_state_weight() { return Matrix::Identity(2, 2); }

Matrix cart_spring_input_weight() { return Matrix::Identity(1, 1); }

PlantModel cart_spring_model(const CartSpringParams &p) {
  return {"cart_spring", 2, 1,
          [p](const StateVec &x, const InputVec &u) { return cart_spring_step(p, x, u); },
          StateVec::Zero(2), InputVec::Zero(1)};
}

Problem cart_spring_problem(std::size_t horizon, const CartSpringParams &p) {
  Problem prob;
  prob.model = cart_spring_model(p);
  prob.constraints.state_box.lower = Eigen::Vector2d(-p.position_limit, -kInf);
  prob.constraints.state_box.upper = Eigen::Vector2d(p.position_limit, kInf);
  prob.constraints.input_box.lower = Eigen::VectorXd::Constant(1, -p.input_limit);
  prob.constraints.input_box.upper = Eigen::VectorXd::Constant(1, p.input_limit);
  prob.constraints.terminal =
      EllipsoidSet{StateVec::Zero(2), cart_spring_terminal_weight(), p.terminal_level};
  prob.cost = CostSpec::constant(horizon, cart_spring_state_weight(), cart_spring_input_weight(),
                                 cart_spring_terminal_weight(), StateVec::Zero(2),
                                 InputVec::Zero(1));
  prob.terminal_law = [p](const StateVec &x) { return cart_spring_terminal_control(p, x); };
  return prob;
}

// ---------------------------------------------------------------------------
// Buck-boost

StateVec buck_boost_equilibrium_state() { return Eigen::Vector2d(20.0, 0.5); }

InputVec buck_boost_equilibrium_input() { return Eigen::Vector2d(0.81, 0.4); }

StateVec buck_boost_step(const BuckBoostParams &p, const StateVec &x, const InputVec &u) {
  require_dims(x, 2, u, 2, "buck_boost_step");
  const double ts = p.sample_time;
  const double C = p.capacitance;
  const double L = p.inductance;

  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  A(0, 0) -= ts / (p.load_resistance * C);
  A(1, 1) -= ts * p.inductor_resistance / L;
  Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
  B(1, 0) = ts * p.source_voltage / L;
  Eigen::Matrix2d C1 = Eigen::Matrix2d::Zero();
  C1(1, 1) = ts / C;
  Eigen::Matrix2d C2 = Eigen::Matrix2d::Zero();
  C2(0, 1) = -ts / L;

  const Eigen::Vector2d xv = x;
  const Eigen::Vector2d uv = u;
  Eigen::Matrix2d bilinear;
  bilinear.row(0) = xv.transpose() * C1;
  bilinear.row(1) = xv.transpose() * C2;
  return A * xv + B * uv + bilinear * uv;
}

Matrix buck_boost_feedback_gain() {
  Matrix K(2, 2);
  K << -0.0014, -0.3246, 0.0001, -0.0055;
  return K;
}

InputVec buck_boost_terminal_control(const StateVec &x) {
  if (x.size() != 2) {
    throw ContractViolation("buck_boost_terminal_control: dimension mismatch");
  }
  return buck_boost_equilibrium_input() +
         buck_boost_feedback_gain() * (x - buck_boost_equilibrium_state());
}

Matrix buck_boost_terminal_weight() {
  Matrix P(2, 2);
  P << 46.6617, 42.8039, 42.8039, 69.4392;
  return P;
}

Matrix buck_boost_state_weight() { return diag({1.0, 2.0}); }

Matrix buck_boost_input_weight() { return Matrix::Identity(2, 2); }

PlantModel buck_boost_model(const BuckBoostParams &p) {
  return {"buck_boost", 2, 2,
          [p](const StateVec &x, const InputVec &u) { return buck_boost_step(p, x, u); },
          buck_boost_equilibrium_state(), buck_boost_equilibrium_input()};
}

BoxSet buck_boost_state_box() {
  return {Eigen::Vector2d(-0.1, 0.0), Eigen::Vector2d(22.5, 3.0)};
}

BoxSet buck_boost_input_box() {
  return {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0)};
}

Problem buck_boost_problem(std::size_t horizon, const BuckBoostParams &p) {
  Problem prob;
  prob.model = buck_boost_model(p);
  prob.constraints.state_box = buck_boost_state_box();
  prob.constraints.input_box = buck_boost_input_box();
  if (p.use_terminal_set) {
    prob.constraints.terminal = EllipsoidSet{buck_boost_equilibrium_state(),
                                             buck_boost_terminal_weight(), p.terminal_level};
  }
  prob.cost = CostSpec::constant(horizon, buck_boost_state_weight(), buck_boost_input_weight(),
                                 buck_boost_terminal_weight(), buck_boost_equilibrium_state(),
                                 buck_boost_equilibrium_input());
  prob.terminal_law = [](const StateVec &x) { return buck_boost_terminal_control(x); };
  return prob;
}

bool buck_boost_level_admissible(const BuckBoostParams &p, double level,
                                 std::size_t boundary_points) {
  const StateVec xe = buck_boost_equilibrium_state();
  const Matrix P = buck_boost_terminal_weight();
  const EllipsoidSet set{xe, P, level};
  const BoxSet state_box = buck_boost_state_box();
  const BoxSet input_box = buck_boost_input_box();
  // P = L L'; points L'^{-1} z with |z|^2 = level lie on the boundary.
  const Eigen::LLT<Matrix> llt(P);
  const Matrix Lt = llt.matrixU();
  for (std::size_t i = 0; i < boundary_points; ++i) {
    const double theta =
        2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(boundary_points);
    const Eigen::Vector2d z = std::sqrt(level) * Eigen::Vector2d(std::cos(theta), std::sin(theta));
    const StateVec x = xe + Lt.triangularView<Eigen::Upper>().solve(z);
    const InputVec u = buck_boost_terminal_control(x);
    if (!input_box.contains(u) || !state_box.contains(x)) {
      return false;
    }
    if (!set.contains(buck_boost_step(p, x, u))) {
      return false;
    }
  }
  return true;
}

double calibrate_buck_boost_terminal_level(const BuckBoostParams &p, std::size_t boundary_points,
                                           int bisection_steps) {
  double lo = 0.0;
  for (int e = -3; e <= 3; ++e) {
    const double level = std::pow(10.0, e);
    if (!buck_boost_level_admissible(p, level, boundary_points)) {
      break;
    }
    lo = level;
  }
  if (lo == 0.0) {
    return 0.0;
  }
  double hi = 10.0 * lo;
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (buck_boost_level_admissible(p, mid, boundary_points)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Wheeled mobile robot

StateVec wmr_step(const WmrParams &p, const StateVec &x, const InputVec &u) {
  require_dims(x, 3, u, 2, "wmr_step");
  StateVec next(3);
  next[0] = x[0] + u[0] * std::cos(x[2]) * p.sample_time;
  next[1] = x[1] + u[0] * std::sin(x[2]) * p.sample_time;
  next[2] = x[2] + u[1] * p.sample_time;
  return next;
}

PlantModel wmr_model(const WmrParams &p) {
  return {"wmr", 3, 2, [p](const StateVec &x, const InputVec &u) { return wmr_step(p, x, u); },
          StateVec::Zero(3), InputVec::Zero(2)};
}

CostSpec wmr_cost(std::size_t horizon) {
  const Matrix Q = diag({1.0, 1.0, 0.5});
  const Matrix R = diag({0.1, 0.1});
  CostSpec cost;
  cost.stage_state_weights.reserve(horizon);
  for (std::size_t j = 0; j < horizon; ++j) {
    cost.stage_state_weights.push_back(j == 0 ? Matrix(Matrix::Zero(3, 3))
                                              : Matrix(std::ldexp(1.0, static_cast<int>(j) - 1) * Q));
  }
  cost.stage_input_weights.assign(horizon, R);
  cost.terminal_weight = 50.0 * std::ldexp(1.0, static_cast<int>(horizon) - 1) * Q;
  cost.state_ref = StateVec::Zero(3);
  cost.input_ref = InputVec::Zero(2);
  return cost;
}

Problem wmr_problem(std::size_t horizon, const WmrParams &p) {
  Problem prob;
  prob.model = wmr_model(p);
  prob.constraints.state_box = BoxSet::unbounded(3);
  prob.constraints.input_box = {Eigen::Vector2d(-p.speed_limit, -p.turn_rate_limit),
                                Eigen::Vector2d(p.speed_limit, p.turn_rate_limit)};
  if (p.obstacle) {
    prob.constraints.obstacles.push_back(*p.obstacle);
  }
  prob.cost = wmr_cost(horizon);
  return prob;
}

// ---------------------------------------------------------------------------

InputVec terminal_control(PlantId plant, const StateVec &x) {
  switch (plant) {
  case PlantId::CartSpring:
    return cart_spring_terminal_control(CartSpringParams{}, x);
  case PlantId::BuckBoost:
    return buck_boost_terminal_control(x);
  case PlantId::Wmr:
    break;
  }
  throw NoTerminalLaw("terminal_control: plant '" + to_string(plant) +
                      "' has no terminal feedback law");
}

std::optional<EllipsoidSet> terminal_set(PlantId plant) {
  switch (plant) {
  case PlantId::CartSpring:
    return cart_spring_problem(1).constraints.terminal;
  case PlantId::BuckBoost:
    return buck_boost_problem(1).constraints.terminal;
  case PlantId::Wmr:
    break;
  }
  return std::nullopt;
}

} // namespace snmpc::models
