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

#ifndef COP_PIPELINE_HPP
#define COP_PIPELINE_HPP

#include <cstdint>
#include <limits>
#include <string>

#include "cop/mission.hpp"
#include "cop/optimizer.hpp"
#include "cop/scalarization.hpp"

namespace cop {

struct PreconditionOptions {
  /// Phase 1: drive the rotor-bound violation to zero.
  OptimizerBudget feasibility{.max_evaluations = 150, .target = 0.0};
  /// Phase 2: move the tail way-point until the nominal closed loop ends on
  /// the target.
  OptimizerBudget terminal{.max_evaluations = 80, .rho_begin = 0.1, .rho_end = 1e-5,
                           .target = 1e-3};
  double offset_limit = 1.0;        ///< box on the tail offset, m
  double terminal_tolerance = 1e-2;  ///< reported, m
  /// Seeded uniform jitter of the interior way-points around the straight line.
  double jitter_position = 0.3;  ///< m
  double jitter_yaw = 0.2;       ///< rad
};

struct PreconditionResult {
  VecX a_init;
  Vec3 tail_offset = Vec3::Zero();
  OptRun feasibility;
  OptRun terminal;
  bool feasibility_ran = false;
  Evaluation evaluation;  ///< nominal closed loop of a_init (no objectives)
  bool terminal_ok = false;
};

/// Produces a dynamically feasible start a_INIT and sets the mission's tail
/// offset so the nominal closed loop ends on the target. Throws
/// InfeasibleStartError when the rotor bounds cannot be met.
PreconditionResult precondition(Mission& mission, std::uint64_t seed,
                                const PreconditionOptions& options = {});

enum class StageStatus { kNotRun, kOk, kSkipped, kFailed };
std::string to_string(StageStatus s);

struct StageResult {
  std::string name;
  StageStatus status = StageStatus::kNotRun;
  std::string reason;
  OptRun run;
  VecX a;
  Evaluation evaluation;  ///< all objectives at a
};

struct PipelineOptions {
  std::uint64_t seed = 0;
  PreconditionOptions precondition;
  OptimizerBudget stage;  ///< individual, SIS and COP stages
  VecX sis_weights = (VecX(3) << 0.5, 0.5, 0.0).finished();
  VecX cop_weights = (VecX(3) << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).finished();
  double rho = 1e-4;
  Augmentation augmentation = Augmentation::kNormalized;
};

struct PipelineResult {
  PreconditionResult precondition;
  StageResult init;  ///< a_INIT with its evaluation; run stays empty
  StageResult pi;
  StageResult theta;
  StageResult e2log;
  StageResult sis;
  StageResult cop;
  MatX cost_matrix;  ///< row j: objectives at the minimizer of objective j
  ParetoAnchors anchors;
  bool anchors_degenerate = false;
  double sis_utility_init = std::numeric_limits<double>::quiet_NaN();
  double sis_utility_cop = std::numeric_limits<double>::quiet_NaN();
  bool accepted = false;
  std::string verdict;
  double wall_time_s = 0.0;

  const StageResult& stage(const std::string& name) const;
};

/// Precondition, minimize each objective alone, build the anchors, run the
/// SIS and COP scalarized stages from a_INIT and apply the posterior filter.
/// Stage failures are recorded; stages that depend on them are skipped.
PipelineResult run_pipeline(Mission& mission, const PipelineOptions& options);

/// Runs one stage from a0: "pi", "theta", "e2log" minimize that objective,
/// "sis" and "cop" minimize the Tchebycheff utility at the given anchors.
StageResult run_stage(const Mission& mission, const std::string& name, const VecX& a0,
                      const OptimizerBudget& budget, const ParetoAnchors* anchors = nullptr,
                      const VecX& weights = VecX(), double rho = 1e-4,
                      Augmentation augmentation = Augmentation::kNormalized);

/// Accept the COP result only when it strictly improves both the SIS
/// utility and the E2LOG cost over the initial trajectory.
bool posterior_filter(double sis_cop, double e2log_cop, double sis_init, double e2log_init);

}  // namespace cop

#endif  // COP_PIPELINE_HPP
