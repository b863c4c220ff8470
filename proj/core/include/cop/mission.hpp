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

#ifndef COP_MISSION_HPP
#define COP_MISSION_HPP

#include <limits>
#include <string>

#include "cop/observability.hpp"
#include "cop/sensitivity.hpp"
#include "cop/simulation.hpp"
#include "cop/trajectory.hpp"

namespace cop {

/// Start and target way-points plus the shape of the decision vector.
struct MissionSpec {
  Vec3 start = Vec3::Zero();
  Vec3 target = Vec3(3.0, 3.0, 0.5);
  double start_yaw = 0.0;
  double target_yaw = 0.0;
  double duration = 10.0;  ///< T, s
  int n_pieces = 3;
  int n_jc = 3;
  bool free_derivatives = false;
  Vec3 workspace_min = Vec3(-1.0, -1.0, -2.0);
  Vec3 workspace_max = Vec3(6.0, 6.0, 3.0);
  double yaw_limit = 3.14159265358979323846;
  double derivative_limit = 5.0;

  void validate() const;
};

/// How a candidate trajectory is scored.
struct EvaluationSettings {
  ClosedLoopModel model;
  IntegratorOptions integrator;
  SensitivityCostOptions sensitivity_cost;
  MeasurementModel measurement;
  GramianOptions gramian;
};

/// Which objectives an evaluation computes.
struct ObjectiveMask {
  bool pi = true;
  bool theta = true;
  bool e2log = true;

  bool needs_sensitivities() const { return pi || theta; }
  static ObjectiveMask all() { return {}; }
  static ObjectiveMask none() { return {false, false, false}; }
};

/// Scores of one decision vector. Objectives that were not requested or
/// could not be computed are NaN or +inf respectively.
struct Evaluation {
  double pi = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double e2log = std::numeric_limits<double>::quiet_NaN();  ///< -lambda_min
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double rotor_margin = std::numeric_limits<double>::quiet_NaN();
  double rotor_violation = std::numeric_limits<double>::quiet_NaN();
  double terminal_error = std::numeric_limits<double>::quiet_NaN();
  double tracking_error = std::numeric_limits<double>::quiet_NaN();
  int saturation_samples = 0;
  int bound_violations = 0;
  bool diverged = false;
  std::string failure;

  /// (F_pi, F_theta, F_e2log).
  VecX objectives() const;
};

/// A planning problem: fixed head and (possibly offset) tail way-points,
/// the feasible box of the interior way-points and the scoring settings.
class Mission {
 public:
  Mission(MissionSpec spec, EvaluationSettings settings);

  const MissionSpec& spec() const { return spec_; }
  const EvaluationSettings& settings() const { return settings_; }
  const WaypointLayout& layout() const { return layout_; }
  const FeasibleBox& box() const { return box_; }
  int dimension() const { return layout_.size(); }

  /// Offset of the commanded tail position from the true target.
  const Vec3& tail_offset() const { return tail_offset_; }
  void set_tail_offset(const Vec3& offset);

  State13 initial_state() const;
  PiecewiseBezier trajectory(const VecX& a) const;

  /// Closed loop at the nominal parameters.
  SimTrace simulate_nominal(const VecX& a) const;
  /// Closed loop at p_real (the controller keeps the nominal parameters).
  SimTrace simulate(const VecX& a, const ParamVector& p_real) const;
  /// Closed loop at the nominal parameters with sensitivities.
  SimTrace propagate(const VecX& a) const;

  /// Scores a decision vector. Never throws on divergence; the result is
  /// flagged instead and the requested objectives are +inf.
  Evaluation evaluate(const VecX& a, ObjectiveMask mask = ObjectiveMask::all()) const;

  /// Scores an already simulated trace (nominal parameters).
  Evaluation evaluate_trace(const SimTrace& trace, const PiecewiseBezier& traj,
                            ObjectiveMask mask) const;

  /// E2LOG accumulator over a nominal trace.
  GramianAccumulator gramian(const SimTrace& trace) const;

 private:
  void rebuild_layout();

  MissionSpec spec_;
  EvaluationSettings settings_;
  Vec3 tail_offset_ = Vec3::Zero();
  WaypointLayout layout_;
  FeasibleBox box_;
};

}  // namespace cop

#endif  // COP_MISSION_HPP
