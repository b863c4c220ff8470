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

#ifndef COP_CONFIG_HPP
#define COP_CONFIG_HPP

#include <string>

#include "cop/campaign.hpp"
#include "cop/mission.hpp"
#include "cop/pipeline.hpp"

namespace cop {

/// Everything a run needs. Loaded from an INI-style file with sections
/// [mission], [vehicle], [controller], [integrator], [sensitivity],
/// [observability], [optimizer], [precondition], [pipeline], [campaign]
/// and [output]. Absent keys keep their defaults; unknown keys are errors.
struct RunConfig {
  MissionSpec mission;
  EvaluationSettings evaluation;
  PipelineOptions pipeline;
  CampaignOptions campaign;
  std::string output_dir = "runs";

  /// Defaults used throughout the tests and the desk-scale experiments:
  /// fixed-step RK4, T = 10 s, 3 pieces, 150 evaluations per stage.
  static RunConfig desk();
};

/// Parses INI text. Throws ConfigError with the offending key.
RunConfig parse_config(const std::string& text, const RunConfig& base = RunConfig::desk());

/// Reads and parses a config file. Throws ConfigError when it cannot be read.
RunConfig load_config(const std::string& path, const RunConfig& base = RunConfig::desk());

/// Every setting as INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);

}  // namespace cop

#endif  // COP_CONFIG_HPP
