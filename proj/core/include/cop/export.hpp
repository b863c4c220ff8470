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

#ifndef COP_EXPORT_HPP
#define COP_EXPORT_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cop/campaign.hpp"
#include "cop/config.hpp"
#include "cop/pipeline.hpp"

namespace cop {

/// Columns t, x, y, z, yaw, then one block of four columns per derivative
/// order (vx..vyaw, ax..ayaw, ...) up to n_jc - 1, sampled every dt.
void write_trajectory_csv(std::ostream& out, const PiecewiseBezier& traj, double dt);

/// Columns t, state (13), controller state (3), applied input (4), command (4).
void write_trace_csv(std::ostream& out, const SimTrace& trace);

/// Columns t, Pi (13 x 2, column-major), Theta (4 x 2, column-major).
void write_sensitivity_csv(std::ostream& out, const SimTrace& trace);

/// Plain matrix, one row per line.
void write_matrix_csv(std::ostream& out, const MatX& m);

/// Standard deviations of additive Gaussian noise per channel group.
struct MeasurementNoise {
  double position = 0.0;
  double orientation = 0.0;
  double body_rate = 0.0;
  double accelerometer = 0.0;
};

struct MeasurementTrace {
  std::vector<double> times;
  std::vector<Vec4> rotor_speeds;  ///< sqrt of the applied squared speeds
  std::vector<std::string> channels;
  MatX truth;     ///< samples x channels, noise-free model outputs
  MatX measured;  ///< truth plus noise
  VecX noise_std;  ///< per channel
};

/// Simulates a at the nominal parameters, sampled at `rate` Hz, and evaluates
/// the measurement model on every sample. Noise draws come from
/// stream::kMeasurements of the seed. Throws SimulationDiverged.
MeasurementTrace export_measurements(const Mission& mission, const VecX& a, double rate,
                                     const MeasurementNoise& noise, std::uint64_t seed);

/// Columns t, w1..w4 (rotor speeds), then every measured channel.
void write_measurements_csv(std::ostream& out, const MeasurementTrace& m);

/// JSON documents; numbers keep full double precision, non-finite values are null.
std::string evaluation_json(const Evaluation& e);
std::string optrun_json(const OptRun& run);
std::string pipeline_summary_json(const PipelineResult& r);
std::string campaign_json(const std::vector<CampaignEntry>& entries,
                          const std::vector<OrderingVerdict>& verdicts,
                          const CampaignOptions& options, std::uint64_t seed,
                          double tolerance = kOrderingTolerance);

/// Writes a run directory:
///   config.ini             every setting, defaults included
///   summary.json           objectives per stage, anchors, verdict
///   anchors.json           cost matrix, utopia, nadir, weights
///   verdict.json           posterior-filter outcome
///   stages/<stage>.json    optimizer run and decision vector
///   trajectories/<stage>.csv   reference sampled at 100 Hz
///   timing.json            wall-clock times (the only non-reproducible file)
void write_run_directory(const std::filesystem::path& dir, const RunConfig& config,
                         const Mission& mission, const PipelineResult& result);

/// Writes text to a file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cop

#endif  // COP_EXPORT_HPP
