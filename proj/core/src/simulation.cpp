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

#include "cop/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "cop/errors.hpp"

namespace cop {

namespace odeint = boost::numeric::odeint;

void IntegratorOptions::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("integrator tolerances must be positive");
  if (!(step > 0.0)) throw DomainError("fixed step must be positive");
  if (!(sample_interval > 0.0)) throw DomainError("sample interval must be positive");
}

void SimTrace::require_ok() const {
  if (diverged) throw SimulationDiverged("simulation diverged: " + failure, last_valid_time);
}

std::vector<double> output_grid(double t0, double t_end, double interval) {
  std::vector<double> grid;
  const double span = t_end - t0;
  const auto n = static_cast<long>(std::floor(span / interval + 1e-9));
  grid.reserve(n + 2);
  for (long k = 0; k <= n; ++k) grid.push_back(t0 + static_cast<double>(k) * interval);
  if (t_end - grid.back() > 1e-9 * std::max(1.0, std::abs(t_end))) {
    grid.push_back(t_end);
  } else {
    grid.back() = t_end;
  }
  return grid;
}

namespace {

bool state_is_sane(const OdeState& y, double bound, std::size_t bounded) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return false;
    if (i < bounded && !(std::abs(y[i]) < bound)) return false;
  }
  return true;
}

}  // namespace

IntegrationStatus integrate_sampled(OdeState& y, const OdeRhs& rhs, const OdeProjection& project,
                                    double t0, double t_end, const IntegratorOptions& opts,
                                    const OdeSampler& sample, std::size_t bounded) {
  opts.validate();
  IntegrationStatus status;
  status.last_valid_time = t0;
  auto system = [&rhs](const OdeState& x, OdeState& dx, double t) { rhs(x, dx, t); };

  const auto grid = output_grid(t0, t_end, opts.sample_interval);
  sample(grid.front(), y);

  double t = t0;
  if (opts.method == IntegratorMethod::kRungeKutta4) {
    odeint::runge_kutta4<OdeState> stepper;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double span = grid[k] - t;
      const auto n_sub = std::max<long>(1, static_cast<long>(std::ceil(span / opts.step - 1e-9)));
      const double h = span / static_cast<double>(n_sub);
      for (long i = 0; i < n_sub; ++i) {
        stepper.do_step(system, y, t, h);
        t = (i + 1 == n_sub) ? grid[k] : t + h;
        if (project) project(y);
        if (!state_is_sane(y, opts.divergence_bound, bounded)) {
          status.diverged = true;
          status.reason = "non-finite or runaway state";
          return status;
        }
        status.last_valid_time = t;
      }
      sample(grid[k], y);
    }
    return status;
  }

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(opts.abs_tol,
                                                                               opts.rel_tol);
  double dt = opts.initial_step;
  OdeState trial;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    while (t < grid[k]) {
      const bool last = dt >= grid[k] - t;
      double try_dt = last ? grid[k] - t : dt;
      trial = y;
      double t_trial = t;
      const auto result = stepper.try_step(system, trial, t_trial, try_dt);
      if (result == odeint::success) {
        y.swap(trial);
        t = last ? grid[k] : t_trial;
        // keep the grown step suggestion unless this was a truncated final step
        if (!last || try_dt > dt) dt = try_dt;
        if (project) project(y);
        stepper.reset();
        if (!state_is_sane(y, opts.divergence_bound, bounded)) {
          status.diverged = true;
          status.reason = "non-finite or runaway state";
          return status;
        }
        status.last_valid_time = t;
      } else {
        dt = try_dt;
        if (!(dt > opts.min_step)) {
          status.diverged = true;
          status.reason = "step size underflow";
          return status;
        }
      }
    }
    sample(grid[k], y);
  }
  return status;
}

SimTrace simulate(const State13& x0, const Vec3& xi0, const PiecewiseBezier& traj,
                  const ParamVector& p_real, const ClosedLoopModel& model, double T,
                  const IntegratorOptions& opts) {
  if (!(T > 0.0)) throw DomainError("simulation horizon must be positive");
  if (traj.start_time() > 0.0 || traj.end_time() < T - 1e-9) {
    throw DomainError("trajectory does not span the simulation horizon");
  }
  constexpr int n_x = state_index::kSize;

  auto rhs = [&](const OdeState& y, OdeState& dy, double t) {
    const Eigen::Map<const State13> x(y.data());
    const Eigen::Map<const Vec3> xi(y.data() + n_x);
    const auto out = control(xi, x, traj.reference(t), model.gains, model.nominal,
                             model.constants, model.controller);
    dy.resize(y.size());
    Eigen::Map<State13>(dy.data()) = dynamics(x, out.u, p_real, model.constants);
    Eigen::Map<Vec3>(dy.data() + n_x) = out.xi_dot;
  };
  auto project = [](OdeState& y) {
    Eigen::Map<Vec4> q(y.data() + state_index::kQuaternion);
    q.normalize();
  };

  SimTrace trace;
  auto sample = [&](double t, const OdeState& y) {
    const State13 x = Eigen::Map<const State13>(y.data());
    const Vec3 xi = Eigen::Map<const Vec3>(y.data() + n_x);
    const auto out = control(xi, x, traj.reference(t), model.gains, model.nominal,
                             model.constants, model.controller);
    trace.times.push_back(t);
    trace.states.push_back(x);
    trace.controller_states.push_back(xi);
    trace.inputs.push_back(out.u);
    trace.commands.push_back(out.u_raw);
    if (out.saturated) ++trace.saturation_samples;
  };

  OdeState y(n_x + 3);
  State13 x_init = x0;
  normalize_quaternion(x_init);
  Eigen::Map<State13>(y.data()) = x_init;
  Eigen::Map<Vec3>(y.data() + n_x) = xi0;

  IntegrationStatus status;
  try {
    status = integrate_sampled(y, rhs, project, 0.0, T, opts, sample);
  } catch (const DegenerateThrustError& e) {
    status.diverged = true;
    status.reason = e.what();
    status.last_valid_time = trace.times.empty() ? 0.0 : trace.times.back();
  }
  trace.diverged = status.diverged;
  trace.last_valid_time = status.last_valid_time;
  trace.failure = status.reason;
  return trace;
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  double acc = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    acc += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
  }
  return acc;
}

double tracking_error_norm(const SimTrace& trace, const PiecewiseBezier& traj) {
  if (trace.times.size() < 2) throw DomainError("tracking error needs at least two samples");
  std::vector<double> err(trace.times.size());
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const Vec3 r_d = traj.evaluate(trace.times[k], 0).head<3>();
    err[k] = (position(trace.states[k]) - r_d).norm();
  }
  return trapezoid(trace.times, err) / trace.duration();
}

double rotor_bound_violation(const SimTrace& trace, const RotorBounds& bounds) {
  const double range = bounds.u_max - bounds.u_min;
  double worst = 0.0;
  for (const auto& u : trace.commands) {
    worst = std::max(worst, (bounds.u_min - u.array()).maxCoeff());
    worst = std::max(worst, (u.array() - bounds.u_max).maxCoeff());
  }
  return worst / range;
}

double rotor_bound_margin(const SimTrace& trace, const RotorBounds& bounds) {
  const double range = bounds.u_max - bounds.u_min;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& u : trace.commands) {
    margin = std::min(margin, (u.array() - bounds.u_min).minCoeff());
    margin = std::min(margin, (bounds.u_max - u.array()).minCoeff());
  }
  return margin / range;
}

int count_bound_violations(const SimTrace& trace, const RotorBounds& bounds) {
  int n = 0;
  for (const auto& u : trace.commands) {
    if ((u.array() < bounds.u_min).any() || (u.array() > bounds.u_max).any()) ++n;
  }
  return n;
}

}  // namespace cop
