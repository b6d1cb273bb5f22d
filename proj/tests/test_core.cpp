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

#include "doctest.h"

#include <cmath>
#include <random>

#include "snmpc/core.hpp"
#include "snmpc/models.hpp"

using namespace snmpc;
namespace m = snmpc::models;

namespace {

InputVec scalar(double v) { return InputVec::Constant(1, v); }

Plan scalar_plan(std::initializer_list<double> values) {
  std::vector<InputVec> inputs;
  for (double v : values) {
    inputs.push_back(scalar(v));
  }
  return Plan(std::move(inputs));
}

} // namespace

TEST_CASE("rollout reproduces hand-evaluated plant steps") {
  const PlantModel cart = m::cart_spring_model();

  SUBCASE("equilibrium stays put") {
    const Trajectory t = rollout(cart, StateVec::Zero(2), Plan(4, scalar(0.0)));
    REQUIRE(t.size() == 5);
    for (const auto &x : t.states) {
      CHECK(x.isZero(0.0));
    }
  }

  SUBCASE("cart from (1, 0) with zero force") {
    // x2' = -T_s rho0/M e^{-1} * 1 = -0.132 e^{-1}
    const Trajectory t = rollout(cart, Eigen::Vector2d(1.0, 0.0), scalar_plan({0.0}));
    CHECK(t[1][0] == doctest::Approx(1.0));
    CHECK(t[1][1] == doctest::Approx(-0.132 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(t[1][1] == doctest::Approx(-0.0485601).epsilon(1e-6));
  }

  SUBCASE("robot drives straight along x") {
    const Trajectory t = rollout(m::wmr_model(), StateVec::Zero(3), Plan({Eigen::Vector2d(0.47, 0.0)}));
    CHECK(t[1][0] == doctest::Approx(0.047));
    CHECK(t[1][1] == 0.0);
    CHECK(t[1][2] == 0.0);
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(rollout(cart, StateVec::Zero(3), scalar_plan({0.0})), ContractViolation);
    CHECK_THROWS_AS(rollout(cart, StateVec::Zero(2), Plan({Eigen::Vector2d(0.0, 0.0)})),
                    ContractViolation);
  }
}

TEST_CASE("rollout prefix depends only on the plan prefix") {
  const PlantModel cart = m::cart_spring_model();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.5, 4.5);
  std::uniform_real_distribution<double> x(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t N = 1 + static_cast<std::size_t>(trial % 12);
    const std::size_t agree = static_cast<std::size_t>(trial) % (N + 1);
    std::vector<InputVec> a, b;
    for (std::size_t i = 0; i < N; ++i) {
      const double shared = u(rng);
      a.push_back(scalar(shared));
      b.push_back(scalar(i < agree ? shared : u(rng)));
    }
    const StateVec x0 = Eigen::Vector2d(x(rng), x(rng));
    const Trajectory ta = rollout(cart, x0, Plan(a));
    const Trajectory tb = rollout(cart, x0, Plan(b));
    for (std::size_t i = 0; i <= agree; ++i) {
      CHECK(ta[i] == tb[i]);
    }
  }
}

TEST_CASE("evaluate_cost on published weights") {
  SUBCASE("zero everything") {
    const Problem p = m::cart_spring_problem(3);
    const Plan plan(3, scalar(0.0));
    CHECK(evaluate_cost(p.cost, rollout(p.model, StateVec::Zero(2), plan), plan) == 0.0);
  }

  SUBCASE("cart, N = 1, x0 = (1, 0)") {
    const Problem p = m::cart_spring_problem(1);
    const Plan plan = scalar_plan({0.0});
    const Trajectory t = rollout(p.model, Eigen::Vector2d(1.0, 0.0), plan);
    // 1 (stage) + x1'Px1 with x1 = (1, -0.132/e)
    const double v = -0.132 * std::exp(-1.0);
    const double expected = 1.0 + 7.0814 + 2.0 * 3.3708 * v + 4.2998 * v * v;
    CHECK(evaluate_cost(p.cost, t, plan) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(evaluate_cost(p.cost, t, plan) == doctest::Approx(7.76417).epsilon(1e-6));
  }

  SUBCASE("robot, N = 1, from (0, 6, 0)") {
    const Problem p = m::wmr_problem(1);
    const Plan plan({Eigen::Vector2d(0.0, 0.0)});
    const Trajectory t = rollout(p.model, Eigen::Vector3d(0.0, 6.0, 0.0), plan);
    CHECK(evaluate_cost(p.cost, t, plan) == doctest::Approx(1800.0));
  }

  SUBCASE("length mismatch") {
    const Problem p = m::cart_spring_problem(2);
    const Plan plan(2, scalar(0.0));
    Trajectory t = rollout(p.model, StateVec::Zero(2), plan);
    t.states.pop_back();
    CHECK_THROWS_AS(evaluate_cost(p.cost, t, plan), ContractViolation);
  }
}

TEST_CASE("evaluate_cost is nonnegative and vanishes only at the reference") {
  const Problem p = m::buck_boost_problem(4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<InputVec> inputs;
    for (int i = 0; i < 4; ++i) {
      inputs.emplace_back(Eigen::Vector2d(d(rng), d(rng)));
    }
    const Plan plan(inputs);
    const StateVec x0 = m::buck_boost_equilibrium_state() + Eigen::Vector2d(d(rng) - 0.5, d(rng) - 0.5);
    CHECK(evaluate_cost(p.cost, rollout(p.model, x0, plan), plan) > 0.0);
  }
  const Plan at_ref(4, m::buck_boost_equilibrium_input());
  const Trajectory t = rollout(p.model, m::buck_boost_equilibrium_state(), at_ref);
  CHECK(evaluate_cost(p.cost, t, at_ref) == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("check_feasible reports the first violation") {
  const Problem p = m::cart_spring_problem(4);

  SUBCASE("origin is feasible") {
    const Plan plan(4, scalar(0.0));
    const auto r = check_feasible(p.constraints, rollout(p.model, StateVec::Zero(2), plan), plan);
    CHECK(r.feasible);
    CHECK_FALSE(r.violation_index.has_value());
  }

  SUBCASE("input above the force limit") {
    const Plan plan = scalar_plan({0.0, 5.0, 0.0, 0.0});
    const auto r = check_feasible(p.constraints, rollout(p.model, StateVec::Zero(2), plan), plan);
    CHECK_FALSE(r.feasible);
    CHECK(*r.violation_index == 1);
    CHECK(*r.violation_kind == ViolationKind::InputBound);
  }

  SUBCASE("position limit crossed after one step") {
    const Problem p1 = m::cart_spring_problem(1);
    const Plan plan = scalar_plan({0.0});
    const Trajectory t = rollout(p1.model, Eigen::Vector2d(2.6, 3.0), plan);
    CHECK(t[1][0] == doctest::Approx(3.8));
    const auto r = check_feasible(p1.constraints, t, plan);
    CHECK_FALSE(r.feasible);
    CHECK(*r.violation_index == 1);
    CHECK(*r.violation_kind == ViolationKind::StateBox);
  }

  SUBCASE("terminal set") {
    const Problem p1 = m::cart_spring_problem(1);
    const Plan plan = scalar_plan({0.0});
    const auto r = check_feasible(p1.constraints, rollout(p1.model, Eigen::Vector2d(1.5, 0.0), plan), plan);
    CHECK_FALSE(r.feasible);
    CHECK(*r.violation_kind == ViolationKind::Terminal);
  }

  SUBCASE("from_index skips the certified prefix") {
    Trajectory t{{Eigen::Vector2d(5.0, 0.0), Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.0, 0.0)}};
    const Plan plan = scalar_plan({9.0, 0.0});
    const Problem p2 = m::cart_spring_problem(2);
    CHECK_FALSE(check_feasible(p2.constraints, t, plan, 0).feasible);
    CHECK(check_feasible(p2.constraints, t, plan, 2).feasible);
    // from_index 1 re-checks input 0.
    CHECK(*check_feasible(p2.constraints, t, plan, 1).violation_kind == ViolationKind::InputBound);
    CHECK_THROWS_AS(check_feasible(p2.constraints, t, plan, 3), ContractViolation);
  }

  SUBCASE("obstacle exclusion is closed on the rim") {
    const Problem r = m::wmr_problem(1);
    const Plan plan({Eigen::Vector2d(0.0, 0.0)});
    const auto rim = rollout(r.model, Eigen::Vector3d(0.0, 2.0, 0.0), plan);
    CHECK(check_feasible(r.constraints, rim, plan).feasible);
    const auto inside = rollout(r.model, Eigen::Vector3d(0.0, 2.5, 0.0), plan);
    const auto rep = check_feasible(r.constraints, inside, plan);
    CHECK(*rep.violation_kind == ViolationKind::Obstacle);
    CHECK(*rep.violation_index == 0);
  }
}

TEST_CASE("flipping a single state out of the box flips feasibility at that index") {
  const Problem p = m::cart_spring_problem(6);
  const Plan plan(6, scalar(0.0));
  const Trajectory base = rollout(p.model, Eigen::Vector2d(0.3, -0.2), plan);
  REQUIRE(check_feasible(p.constraints, base, plan).feasible);
  for (std::size_t i = 0; i < base.size(); ++i) {
    Trajectory flipped = base;
    flipped.states[i][0] = 2.66;
    const auto r = check_feasible(p.constraints, flipped, plan);
    CHECK_FALSE(r.feasible);
    CHECK(*r.violation_index == i);
    CHECK(*r.violation_kind == ViolationKind::StateBox);
  }
}

TEST_CASE("constraints without a terminal set accept any terminal state") {
  ConstraintSpec c;
  c.state_box = BoxSet::unbounded(2);
  c.input_box = BoxSet::unbounded(1);
  CHECK(c.terminal_admissible(Eigen::Vector2d(1e9, -1e9)));
}

TEST_CASE("shift_plan") {
  const Plan abc = scalar_plan({1.0, 2.0, 3.0});
  CHECK(shift_plan(abc, scalar(4.0)) == scalar_plan({2.0, 3.0, 4.0}));
  CHECK(shift_plan(scalar_plan({1.0}), scalar(4.0)) == scalar_plan({4.0}));
  CHECK_THROWS_AS(shift_plan(Plan{}, scalar(4.0)), ContractViolation);
  CHECK_THROWS_AS(shift_plan(abc, Eigen::Vector2d(0.0, 0.0)), ContractViolation);

  SUBCASE("N shifts with recorded appends rebuild any plan") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t N = 1; N <= 8; ++N) {
      std::vector<InputVec> target;
      for (std::size_t i = 0; i < N; ++i) {
        target.push_back(scalar(u(rng)));
      }
      Plan plan(N, scalar(0.0));
      for (const auto &t : target) {
        plan = shift_plan(plan, t);
      }
      CHECK(plan == Plan(target));
    }
  }
}

TEST_CASE("domain type validation") {
  SUBCASE("ellipsoid") {
    EllipsoidSet e{StateVec::Zero(2), Matrix::Identity(2, 2), 1.0};
    CHECK_NOTHROW(e.validate());
    e.shape(0, 1) = 0.5;
    CHECK_THROWS_AS(e.validate(), ContractViolation);
    e.shape = -Matrix::Identity(2, 2);
    CHECK_THROWS_AS(e.validate(), ContractViolation);
    e.shape = Matrix::Identity(2, 2);
    e.level = 0.0;
    CHECK_THROWS_AS(e.validate(), ContractViolation);
  }

  SUBCASE("box") {
    BoxSet b{Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 0.0)};
    CHECK_THROWS_AS(b.validate(), ContractViolation);
    CHECK_FALSE(BoxSet::unbounded(2).contains(Eigen::Vector2d(std::nan(""), 0.0)));
  }

  SUBCASE("plant equilibrium must be a fixed point") {
    PlantModel model = m::cart_spring_model();
    CHECK_NOTHROW(model.validate());
    model.equilibrium_state = Eigen::Vector2d(1.0, 0.0);
    CHECK_THROWS_AS(model.validate(), ContractViolation);
  }

  SUBCASE("cost weights") {
    Problem p = m::cart_spring_problem(3);
    CHECK_NOTHROW(p.validate());
    p.cost.stage_input_weights[1] = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(p.validate(), ContractViolation);
  }
}
