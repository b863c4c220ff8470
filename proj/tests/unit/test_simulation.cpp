/*
 Copyright 2026 The COP Planner Authors

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

#include <cmath>

#include <gtest/gtest.h>

#include "cop/errors.hpp"
#include "cop/simulation.hpp"
#include "test_support.hpp"

namespace cop {
namespace {

constexpr double kPi = 3.14159265358979323846;

IntegratorOptions rk4(double step = 1e-3) {
  IntegratorOptions io;
  io.method = IntegratorMethod::kRungeKutta4;
  io.step = step;
  return io;
}

TEST(OutputGrid, UniformWithShortLastInterval) {
  const auto g = output_grid(0.0, 1.0, 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
  const auto h = output_grid(0.0, 1.05, 0.25);
  ASSERT_EQ(h.size(), 6u);
  EXPECT_DOUBLE_EQ(h.back(), 1.05);
}

TEST(Simulate, HoverIsHeld) {
  ClosedLoopModel model;
  const Vec3 r(1.0, -2.0, 0.5);
  for (auto io : {IntegratorOptions{}, rk4()}) {
    const SimTrace tr = simulate(hover_state(r), Vec3::Zero(), testing::hover_trajectory(r, 5.0),
                                 model.nominal, model, 5.0, io);
    ASSERT_TRUE(tr.ok());
    double worst = 0.0;
    for (const auto& x : tr.states) worst = std::max(worst, (position(x) - r).norm());
    EXPECT_LT(worst, 1e-6);
    EXPECT_EQ(tr.size(), 501u);
    EXPECT_EQ(tr.saturation_samples, 0);
  }
}

TEST(Simulate, FixedAndAdaptiveIntegratorsAgree) {
  ClosedLoopModel model;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(3, 2, 1), 10.0);
  IntegratorOptions dp;
  dp.abs_tol = dp.rel_tol = 1e-9;
  const SimTrace a = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 10.0, rk4());
  const SimTrace b = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 10.0, dp);
  ASSERT_TRUE(a.ok() && b.ok());
  ASSERT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (position(a.states[k]) - position(b.states[k])).norm());
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Simulate, TighterToleranceMovesTheEndStateLittle) {
  ClosedLoopModel model;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(2, 1, 1), 6.0);
  IntegratorOptions a, b;
  a.rel_tol = a.abs_tol = 1e-8;
  b.rel_tol = b.abs_tol = 5e-9;
  const SimTrace ta = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 6.0, a);
  const SimTrace tb = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 6.0, b);
  const State13& xa = ta.states.back();
  const State13& xb = tb.states.back();
  EXPECT_LT((xa - xb).norm() / xa.norm(), 10 * a.rel_tol);
}

TEST(Simulate, FixedStepRunsAreBitIdentical) {
  ClosedLoopModel model;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(1, 1, 1), 4.0);
  const ParamVector p{3.4e-4, 0.0161};
  const SimTrace a = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, p, model, 4.0, rk4(2e-3));
  const SimTrace b = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, p, model, 4.0, rk4(2e-3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.states[k], b.states[k]);
    EXPECT_EQ(a.inputs[k], b.inputs[k]);
  }
}

TEST(Simulate, QuaternionStaysNormalized) {
  ClosedLoopModel model;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(3, -2, 1), 5.0);
  const SimTrace tr = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 5.0, {});
  for (const auto& x : tr.states) EXPECT_NEAR(quaternion(x).norm(), 1.0, 1e-9);
}

TEST(Simulate, DivergenceIsFlaggedWithLastValidTime) {
  ClosedLoopModel model;
  IntegratorOptions io = rk4();
  io.divergence_bound = 2.0;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(4, 0, 0), 4.0);
  const SimTrace tr = simulate(hover_state(Vec3::Zero()), Vec3::Zero(), ref, model.nominal, model, 4.0, io);
  EXPECT_TRUE(tr.diverged);
  EXPECT_FALSE(tr.ok());
  EXPECT_GT(tr.last_valid_time, 0.5);
  EXPECT_LT(tr.last_valid_time, 4.0);
  EXPECT_THROW(tr.require_ok(), SimulationDiverged);
}

TEST(Simulate, TrajectoryMustSpanTheHorizon) {
  ClosedLoopModel model;
  EXPECT_THROW(simulate(hover_state(Vec3::Zero()), Vec3::Zero(), testing::hover_trajectory(Vec3::Zero(), 2.0),
                        model.nominal, model, 3.0, {}),
               DomainError);
}

TEST(Integrate, FreeFallMatchesGravity) {
  const PhysicalConstants c;
  OdeState y(13, 0.0);
  y[state_index::kQuaternion] = 1.0;
  const OdeRhs rhs = [&](const OdeState& s, OdeState& ds, double) {
    const State13 x = Eigen::Map<const State13>(s.data());
    const State13 dx = dynamics(x, RotorInput::Zero(), {}, c);
    ds.assign(dx.data(), dx.data() + 13);
  };
  std::vector<double> vz;
  std::vector<double> ts;
  integrate_sampled(y, rhs, nullptr, 0.0, 2.0, rk4(), [&](double t, const OdeState& s) {
    ts.push_back(t);
    vz.push_back(s[state_index::kVelocity + 2]);
  });
  for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_NEAR(vz[k], -c.gravity * ts[k], 1e-10);  // rounding over 1000 steps
}

SimTrace synthetic_trace(const PiecewiseBezier& ref, double T, const std::function<Vec3(double)>& offset) {
  SimTrace tr;
  for (double t : output_grid(0.0, T, 1e-3)) {
    tr.times.push_back(t);
    tr.states.push_back(hover_state(ref.evaluate(t).head<3>() + offset(t)));
  }
  return tr;
}

TEST(TrackingError, PerfectTrackingIsZero) {
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(1, 2, 3), 3.0);
  const SimTrace tr = synthetic_trace(ref, 3.0, [](double) { return Vec3::Zero(); });
  EXPECT_NEAR(tracking_error_norm(tr, ref), 0.0, 1e-15);
}

TEST(TrackingError, ConstantOffset) {
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(1, 2, 3), 3.0);
  const SimTrace tr = synthetic_trace(ref, 3.0, [](double) { return Vec3(0.0, 0.03, 0.04); });
  EXPECT_NEAR(tracking_error_norm(tr, ref), 0.05, 1e-14);
}

TEST(TrackingError, SineSquaredProfileMatchesClosedForm) {
  const double T = 3.0;
  const PiecewiseBezier ref = testing::rest_to_rest(Vec3::Zero(), Vec3(1, 2, 3), T);
  const SimTrace tr = synthetic_trace(ref, T, [T](double t) {
    const double s = std::sin(kPi * t / T);
    return Vec3(0.2 * s * s, 0.0, 0.0);
  });
  // (1/T) * integral_0^T 0.2 sin^2(pi t / T) dt = 0.1
  EXPECT_NEAR(tracking_error_norm(tr, ref), 0.1, 1e-5);
}

TEST(TrackingError, EmptyTraceIsRejected) {
  const PiecewiseBezier ref = testing::hover_trajectory(Vec3::Zero(), 1.0);
  EXPECT_THROW(tracking_error_norm(SimTrace{}, ref), DomainError);
}

TEST(RotorBounds, MarginAndViolationAgree) {
  SimTrace tr;
  RotorBounds b{0.0, 100.0};
  tr.commands = {RotorInput(10, 20, 30, 40), RotorInput(50, 50, 50, 50)};
  EXPECT_NEAR(rotor_bound_margin(tr, b), 0.1, 1e-15);
  EXPECT_EQ(rotor_bound_violation(tr, b), 0.0);
  EXPECT_EQ(count_bound_violations(tr, b), 0);
  tr.commands.push_back(RotorInput(-5, 50, 120, 50));
  EXPECT_NEAR(rotor_bound_margin(tr, b), -0.2, 1e-15);
  EXPECT_NEAR(rotor_bound_violation(tr, b), 0.2, 1e-15);
  EXPECT_EQ(count_bound_violations(tr, b), 1);
}

TEST(Trapezoid, IntegratesLinearFunctionsExactly) {
  std::vector<double> t{0.0, 0.5, 1.5, 2.0}, v;
  for (double x : t) v.push_back(3 * x + 1);
  EXPECT_NEAR(trapezoid(t, v), 3 * 2.0 + 2.0, 1e-15);
}

}  // namespace
}  // namespace cop
