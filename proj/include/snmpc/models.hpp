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

#ifndef SNMPC_MODELS_HPP
#define SNMPC_MODELS_HPP

#include <cstddef>
#include <optional>
#include <string>

#include "snmpc/core.hpp"

namespace snmpc::models {

enum class PlantId { CartSpring, BuckBoost, Wmr };

std::string to_string(PlantId plant);
/// Accepts "cart_spring", "buck_boost" and "wmr"; throws ConfigError otherwise.
PlantId parse_plant(const std::string &name);

// ---------------------------------------------------------------------------
// Cart with an exponentially softening spring and a damper.

struct CartSpringParams {
  double sample_time = 0.4;
  double spring_rho0 = 0.33;
  double mass = 1.0;
  double damping = 1.1;
  double input_limit = 4.5;    ///< |u| <= input_limit
  double position_limit = 2.65; ///< |x1| <= position_limit
  double terminal_level = 4.7;  ///< X_T = {x | x'Px <= terminal_level}
};

/// Drift part f1(x) of the cart model.
StateVec cart_spring_drift(const CartSpringParams &p, const StateVec &x);
StateVec cart_spring_step(const CartSpringParams &p, const StateVec &x, const InputVec &u);
/// k_f(x) = -[0.8783 1.1204] f1(x)
InputVec cart_spring_terminal_control(const CartSpringParams &p, const StateVec &x);

Matrix cart_spring_terminal_weight();
Matrix cart_spring_state_weight();
Matrix cart_spring_input_weight();

PlantModel cart_spring_model(const CartSpringParams &p = {});
Problem cart_spring_problem(std::size_t horizon, const CartSpringParams &p = {});

// ---------------------------------------------------------------------------
// Bilinear buck-boost converter, x = (v_C, i_L), u = (d1, d2).

/// Largest terminal level found by calibrate_buck_boost_terminal_level() for
/// the default parameters, rounded down. Regenerate with the
/// calibrate_terminal tool when parameters change.
inline constexpr double kBuckBoostTerminalLevel = 7.54;

struct BuckBoostParams {
  double inductor_resistance = 0.2;  ///< R_L [Ohm]
  double capacitance = 22e-6;        ///< C [F]
  double inductance = 220e-6;        ///< L [H]
  double sample_time = 10e-6;        ///< T_s [s]
  double source_voltage = 10.0;      ///< v_s [V]; makes (x_e, u_e) an equilibrium
  double load_resistance = 100.0;    ///< R_H [Ohm]; makes (x_e, u_e) an equilibrium
  double terminal_level = kBuckBoostTerminalLevel;
  bool use_terminal_set = true;
};

StateVec buck_boost_equilibrium_state();
InputVec buck_boost_equilibrium_input();
StateVec buck_boost_step(const BuckBoostParams &p, const StateVec &x, const InputVec &u);
/// u = u_e + K (x - x_e)
InputVec buck_boost_terminal_control(const StateVec &x);

Matrix buck_boost_feedback_gain();
Matrix buck_boost_terminal_weight();
Matrix buck_boost_state_weight();
Matrix buck_boost_input_weight();

PlantModel buck_boost_model(const BuckBoostParams &p = {});
BoxSet buck_boost_state_box();
BoxSet buck_boost_input_box();
Problem buck_boost_problem(std::size_t horizon, const BuckBoostParams &p = {});

/// True when every one of `boundary_points` points on {V_f = level} keeps
/// the terminal law inside the input box, lies in the state box and maps
/// back into {V_f <= level}.
bool buck_boost_level_admissible(const BuckBoostParams &p, double level,
                                 std::size_t boundary_points = 10000);

/// Largest admissible level: scan decades 1e-3 .. 1e3, then bisect inside
/// the last admissible decade.
double calibrate_buck_boost_terminal_level(const BuckBoostParams &p = {},
                                           std::size_t boundary_points = 10000,
                                           int bisection_steps = 40);

// ---------------------------------------------------------------------------
// Wheeled mobile robot (unicycle kinematics), x = (px, py, heading), u = (v, w).

struct WmrParams {
  double sample_time = 0.1;
  double speed_limit = 0.47;
  double turn_rate_limit = 3.77;
  /// Benchmark obstacle between the default start (0, 6) and the goal; not
  /// part of the published setup.
  std::optional<ObstacleSet> obstacle = ObstacleSet{Eigen::Vector2d(0.0, 3.0), 1.0, 0, 1};
};

StateVec wmr_step(const WmrParams &p, const StateVec &x, const InputVec &u);

PlantModel wmr_model(const WmrParams &p = {});
/// Q_0 = 0, Q_j = 2^(j-1) Q, R_j = R, P = 50 Q_N with Q = diag(1, 1, 0.5), R = 0.1 I.
CostSpec wmr_cost(std::size_t horizon);
Problem wmr_problem(std::size_t horizon, const WmrParams &p = {});

// ---------------------------------------------------------------------------
// Default-parameter dispatch.

/// Throws NoTerminalLaw for the robot.
InputVec terminal_control(PlantId plant, const StateVec &x);
std::optional<EllipsoidSet> terminal_set(PlantId plant);

} // namespace snmpc::models

#endif // SNMPC_MODELS_HPP
