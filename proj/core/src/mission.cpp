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

#include "cop/mission.hpp"

#include <cmath>
#include <limits>

#include "cop/errors.hpp"

namespace cop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Waypoint rest_waypoint(double t, const Vec3& r, double yaw, int n_jc) {
  Waypoint wp{t, MatX::Zero(4, n_jc)};
  wp.values.col(0) << r, yaw;
  return wp;
}

}  // namespace

void MissionSpec::validate() const {
  if (!(duration > 0.0)) throw DomainError("mission duration must be positive");
  if (n_pieces < 1) throw DomainError("mission needs at least one piece");
  if (n_jc < 1) throw DomainError("n_jc must be at least 1");
  if ((workspace_min.array() > workspace_max.array()).any()) {
    throw DomainError("workspace lower bound exceeds upper bound");
  }
  auto inside = [&](const Vec3& r) {
    return (r.array() >= workspace_min.array()).all() && (r.array() <= workspace_max.array()).all();
  };
  if (!inside(start)) throw DomainError("start position outside the workspace");
  if (!inside(target)) throw DomainError("target position outside the workspace");
  if (!(yaw_limit > 0.0) || !(derivative_limit >= 0.0)) {
    throw DomainError("yaw and derivative limits must be positive");
  }
}

VecX Evaluation::objectives() const {
  VecX f(3);
  f << pi, theta, e2log;
  return f;
}

Mission::Mission(MissionSpec spec, EvaluationSettings settings)
    : spec_(std::move(spec)), settings_(std::move(settings)) {
  spec_.validate();
  settings_.integrator.validate();
  settings_.measurement.validate();
  settings_.gramian.validate();
  rebuild_layout();
}

void Mission::set_tail_offset(const Vec3& offset) {
  tail_offset_ = offset;
  rebuild_layout();
}

void Mission::rebuild_layout() {
  layout_ = WaypointLayout(rest_waypoint(0.0, spec_.start, spec_.start_yaw, spec_.n_jc),
                           rest_waypoint(spec_.duration, spec_.target + tail_offset_,
                                         spec_.target_yaw, spec_.n_jc),
                           spec_.n_pieces, spec_.free_derivatives);
  box_ = make_feasible_box(layout_, spec_.workspace_min, spec_.workspace_max, spec_.yaw_limit,
                           spec_.derivative_limit);
}

State13 Mission::initial_state() const {
  return make_state(spec_.start, Vec3::Zero(), quat_from_axis_angle(Vec3::UnitZ(), spec_.start_yaw),
                    Vec3::Zero());
}

PiecewiseBezier Mission::trajectory(const VecX& a) const {
  if (a.size() != layout_.size()) throw DomainError("decision vector has the wrong size");
  return layout_.build(a);
}

SimTrace Mission::simulate_nominal(const VecX& a) const {
  return simulate(a, settings_.model.nominal);
}

SimTrace Mission::simulate(const VecX& a, const ParamVector& p_real) const {
  return cop::simulate(initial_state(), Vec3::Zero(), trajectory(a), p_real, settings_.model,
                       spec_.duration, settings_.integrator);
}

SimTrace Mission::propagate(const VecX& a) const {
  return cop::propagate(initial_state(), Vec3::Zero(), trajectory(a), settings_.model,
                        spec_.duration, settings_.integrator);
}

GramianAccumulator Mission::gramian(const SimTrace& trace) const {
  return e2log(trace, settings_.measurement, settings_.model.constants, settings_.model.nominal,
               settings_.gramian);
}

Evaluation Mission::evaluate(const VecX& a, ObjectiveMask mask) const {
  const PiecewiseBezier traj = trajectory(a);
  const SimTrace trace = mask.needs_sensitivities() ? propagate(a) : simulate_nominal(a);
  return evaluate_trace(trace, traj, mask);
}

Evaluation Mission::evaluate_trace(const SimTrace& trace, const PiecewiseBezier& traj,
                                   ObjectiveMask mask) const {
  Evaluation ev;
  const RotorBounds& bounds = settings_.model.controller.bounds;
  ev.saturation_samples = trace.saturation_samples;
  ev.bound_violations = count_bound_violations(trace, bounds);
  ev.diverged = trace.diverged;
  ev.failure = trace.failure;
  if (trace.diverged || trace.size() == 0) {
    ev.diverged = true;
    if (ev.failure.empty()) ev.failure = "empty trace";
    if (mask.pi) ev.pi = kInf;
    if (mask.theta) ev.theta = kInf;
    if (mask.e2log) ev.e2log = kInf;
    ev.rotor_margin = -kInf;
    ev.rotor_violation = kInf;
    ev.terminal_error = kInf;
    ev.tracking_error = kInf;
    return ev;
  }
  ev.rotor_margin = rotor_bound_margin(trace, bounds);
  ev.rotor_violation = rotor_bound_violation(trace, bounds);
  ev.terminal_error = (position(trace.states.back()) - spec_.target).norm();
  ev.tracking_error = tracking_error_norm(trace, traj);
  if (mask.pi) ev.pi = cost_pi(trace, settings_.sensitivity_cost);
  if (mask.theta) ev.theta = cost_theta(trace, settings_.sensitivity_cost);
  if (mask.e2log) {
    try {
      const GramianAccumulator acc = gramian(trace);
      ev.lambda_min = acc.lambda_min();
      ev.e2log = -ev.lambda_min;
    } catch (const NumericalError& e) {
      ev.e2log = kInf;
      ev.failure = e.what();
    }
  }
  return ev;
}

}  // namespace cop
