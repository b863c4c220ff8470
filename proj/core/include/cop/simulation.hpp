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

#ifndef COP_SIMULATION_HPP
#define COP_SIMULATION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cop/controller.hpp"
#include "cop/quadrotor.hpp"
#include "cop/trajectory.hpp"

namespace cop {

enum class IntegratorMethod { kDormandPrince, kRungeKutta4 };

struct IntegratorOptions {
  IntegratorMethod method = IntegratorMethod::kDormandPrince;
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double step = 1e-3;             ///< fixed step for RK4, s
  double sample_interval = 0.01;  ///< output grid, s
  double initial_step = 1e-3;     ///< first trial step for the adaptive method
  double min_step = 1e-12;
  double divergence_bound = 1e4;  ///< any state entry above this magnitude diverges

  void validate() const;
};

/// Everything about the closed loop that does not change between flights:
/// rigid-body constants, controller gains and limits, nominal parameters p_c.
struct ClosedLoopModel {
  PhysicalConstants constants;
  ControllerGains gains;
  ControllerOptions controller;
  ParamVector nominal;
};

/// Closed-loop parameter sensitivities at one output time.
struct SensitivityBundle {
  Eigen::Matrix<double, 13, 2> pi = Eigen::Matrix<double, 13, 2>::Zero();
  Eigen::Matrix<double, 3, 2> pi_xi = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 4, 2> theta = Eigen::Matrix<double, 4, 2>::Zero();
};

/// Time-indexed closed-loop trace on a uniform output grid.
struct SimTrace {
  std::vector<double> times;
  std::vector<State13> states;
  std::vector<Vec3> controller_states;
  std::vector<RotorInput> inputs;    ///< applied (clamped) squared rotor speeds
  std::vector<RotorInput> commands;  ///< unclamped controller output
  std::vector<SensitivityBundle> sensitivities;  ///< empty unless propagated

  int saturation_samples = 0;
  bool diverged = false;
  double last_valid_time = 0.0;
  std::string failure;

  bool ok() const { return !diverged; }
  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  /// Throws SimulationDiverged when the run was flagged.
  void require_ok() const;
};

// ---- generic sampled integration --------------------------------------

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(const OdeState& y, OdeState& dy, double t)>;
using OdeProjection = std::function<void(OdeState& y)>;
using OdeSampler = std::function<void(double t, const OdeState& y)>;

struct IntegrationStatus {
  bool diverged = false;
  double last_valid_time = 0.0;
  std::string reason;
};

/// Integrates y from t0 to t_end, calling `project` after every accepted
/// step and `sample` on the output grid (including both end points).
/// The first `bounded` entries must stay below opts.divergence_bound in
/// magnitude; every entry must stay finite.
IntegrationStatus integrate_sampled(OdeState& y, const OdeRhs& rhs, const OdeProjection& project,
                                    double t0, double t_end, const IntegratorOptions& opts,
                                    const OdeSampler& sample,
                                    std::size_t bounded = static_cast<std::size_t>(-1));

/// Output grid {t0, t0 + h, ..., t_end}; the last interval may be shorter.
std::vector<double> output_grid(double t0, double t_end, double interval);

// ---- closed loop --------------------------------------------------------

/// Integrates plant and controller over [0, T]. The controller always uses
/// model.nominal; the plant uses p_real. Divergence is flagged on the trace.
SimTrace simulate(const State13& x0, const Vec3& xi0, const PiecewiseBezier& traj,
                  const ParamVector& p_real, const ClosedLoopModel& model, double T,
                  const IntegratorOptions& opts);

/// (1/T) * integral of ||r(t) - r_d(t)|| over the trace (trapezoidal).
double tracking_error_norm(const SimTrace& trace, const PiecewiseBezier& traj);

/// Largest rotor-bound violation of the unclamped commands, normalized by
/// (u_max - u_min); zero when every command is within bounds.
double rotor_bound_violation(const SimTrace& trace, const RotorBounds& bounds);

/// Smallest distance of any unclamped command to either bound, normalized
/// by (u_max - u_min); negative when a bound is violated.
double rotor_bound_margin(const SimTrace& trace, const RotorBounds& bounds);

/// Number of samples whose unclamped command leaves the bounds.
int count_bound_violations(const SimTrace& trace, const RotorBounds& bounds);

/// Trapezoidal integral of samples over the time grid.
double trapezoid(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace cop

#endif  // COP_SIMULATION_HPP
