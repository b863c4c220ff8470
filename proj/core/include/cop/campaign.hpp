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

#ifndef COP_CAMPAIGN_HPP
#define COP_CAMPAIGN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cop/mission.hpp"
#include "cop/rng.hpp"

namespace cop {

enum class PerturbationLaw {
  kUniform,        ///< each coefficient uniform in nominal * [1 - a, 1 + a]
  kNormalClipped,  ///< relative deviation N(0, (a/2)^2) clipped to [-a, a]
};

std::string to_string(PerturbationLaw law);
PerturbationLaw parse_perturbation_law(const std::string& name);

/// Draws perturbed physical parameters around the nominal ones.
ParamVector perturb(const ParamVector& nominal, double amplitude, PerturbationLaw law, Rng& rng);

struct FlightSamples {
  std::vector<double> errors;      ///< tracking error of every completed flight
  std::vector<ParamVector> params;  ///< parameters of every flight, in order
  int diverged = 0;
  int saturated = 0;  ///< flights with at least one saturated sample
};

/// Flies trajectory a n_flights times with perturbed plant parameters. Flight
/// i draws from stream derive_seed(seed, stream::kFlights + i), so every
/// trajectory type sees the same parameter draws for the same seed. Runs on
/// up to "workers" threads; the result does not depend on the worker count.
FlightSamples monte_carlo_tracking(const Mission& mission, const VecX& a, double amplitude,
                                   int n_flights, std::uint64_t seed,
                                   PerturbationLaw law = PerturbationLaw::kUniform,
                                   int workers = 1);

struct SummaryStats {
  int n = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Quartiles by linear interpolation between order statistics.
/// Throws DomainError on an empty sample.
SummaryStats summarize(std::vector<double> samples);

/// Linear-interpolation quantile of a sorted sample, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

struct CampaignEntry {
  int target = 0;
  std::string trajectory;  ///< "init", "sis", "e2log", "cop"
  double amplitude = 0.0;
  SummaryStats stats;
  double lambda_min = 0.0;  ///< nominal E2LOG smallest eigenvalue of the trajectory
  int diverged = 0;
  int saturated = 0;
  std::vector<double> samples;
};

struct OrderingVerdict {
  int target = 0;
  double amplitude = 0.0;
  int samples = 0;
  double median_sis = 0.0;
  double median_cop = 0.0;
  double median_e2log = 0.0;
  bool sis_le_cop = false;
  bool cop_le_e2log = false;
};

/// Default relative tolerance of the median comparisons in reports.
inline constexpr double kOrderingTolerance = 0.01;

/// a <= b within the relative tolerance (a <= b (1 + tol) for b >= 0).
bool le_within(double a, double b, double tol = kOrderingTolerance);

/// Median ordering SIS <= COP <= E2LOG for every (target, amplitude) group
/// that holds all three trajectory types. Throws DomainError when a group
/// misses one of them.
std::vector<OrderingVerdict> campaign_compare(const std::vector<CampaignEntry>& entries,
                                              double tolerance = kOrderingTolerance);

struct CampaignOptions {
  std::vector<double> amplitudes{0.01};
  int flights = 10;
  int targets = 3;
  PerturbationLaw law = PerturbationLaw::kUniform;
  int workers = 1;
  Vec3 target_min = Vec3(2.0, 2.0, -0.5);
  Vec3 target_max = Vec3(5.0, 5.0, 1.0);
  std::vector<std::string> trajectories{"init", "sis", "e2log", "cop"};

  void validate() const;
};

/// Uniform random targets in the box, from stream::kTargets of the seed.
std::vector<Vec3> draw_targets(const CampaignOptions& options, std::uint64_t seed);

}  // namespace cop

#endif  // COP_CAMPAIGN_HPP
