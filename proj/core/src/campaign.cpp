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

#include "cop/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <tuple>

#include "cop/errors.hpp"

namespace cop {

std::string to_string(PerturbationLaw law) {
  return law == PerturbationLaw::kUniform ? "uniform" : "normal-clipped";
}

PerturbationLaw parse_perturbation_law(const std::string& name) {
  if (name == "uniform") return PerturbationLaw::kUniform;
  if (name == "normal-clipped" || name == "normal") return PerturbationLaw::kNormalClipped;
  throw DomainError("unknown perturbation law '" + name + "'");
}

ParamVector perturb(const ParamVector& nominal, double amplitude, PerturbationLaw law, Rng& rng) {
  if (!(amplitude >= 0.0) || amplitude >= 1.0) {
    throw DomainError("perturbation amplitude must lie in [0, 1)");
  }
  auto factor = [&]() {
    if (law == PerturbationLaw::kUniform) return 1.0 + uniform(rng, -amplitude, amplitude);
    const double z = 0.5 * amplitude * standard_normal(rng);
    return 1.0 + std::clamp(z, -amplitude, amplitude);
  };
  ParamVector p;
  p.kf = nominal.kf * factor();
  p.km = nominal.km * factor();
  return p;
}

FlightSamples monte_carlo_tracking(const Mission& mission, const VecX& a, double amplitude,
                                   int n_flights, std::uint64_t seed, PerturbationLaw law,
                                   int workers) {
  if (n_flights < 1) throw DomainError("at least one flight is required");
  const PiecewiseBezier traj = mission.trajectory(a);
  const auto n = static_cast<std::size_t>(n_flights);
  std::vector<ParamVector> params(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng(seed, stream::kFlights + i);
    params[i] = perturb(mission.settings().model.nominal, amplitude, law, rng);
  }
  std::vector<double> error(n);
  std::vector<char> diverged(n, 0);
  std::vector<char> saturated(n, 0);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      const SimTrace trace = mission.simulate(a, params[i]);
      diverged[i] = trace.diverged ? 1 : 0;
      saturated[i] = trace.saturation_samples > 0 ? 1 : 0;
      error[i] = trace.diverged ? 0.0 : tracking_error_norm(trace, traj);
    }
  };
  const int width = std::clamp(workers, 1, n_flights);
  if (width == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  FlightSamples out;
  out.params = std::move(params);
  for (std::size_t i = 0; i < n; ++i) {
    if (diverged[i]) {
      ++out.diverged;
      continue;
    }
    out.errors.push_back(error[i]);
    out.saturated += saturated[i];
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("cannot summarize an empty sample");
  std::sort(samples.begin(), samples.end());
  SummaryStats s;
  s.n = static_cast<int>(samples.size());
  s.min = samples.front();
  s.max = samples.back();
  s.q1 = quantile_sorted(samples, 0.25);
  s.median = quantile_sorted(samples, 0.5);
  s.q3 = quantile_sorted(samples, 0.75);
  // Summing the sorted sample keeps the mean independent of input order.
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  return s;
}

bool le_within(double a, double b, double tol) { return a <= b + tol * std::abs(b); }

std::vector<OrderingVerdict> campaign_compare(const std::vector<CampaignEntry>& entries,
                                              double tolerance) {
  std::map<std::pair<int, double>, std::map<std::string, const CampaignEntry*>> groups;
  for (const auto& e : entries) groups[{e.target, e.amplitude}][e.trajectory] = &e;
  std::vector<OrderingVerdict> out;
  for (const auto& [key, group] : groups) {
    for (const char* need : {"sis", "cop", "e2log"}) {
      if (!group.count(need)) {
        throw DomainError("campaign group for target " + std::to_string(key.first) +
                          " misses trajectory '" + need + "'");
      }
    }
    OrderingVerdict v;
    v.target = key.first;
    v.amplitude = key.second;
    v.median_sis = group.at("sis")->stats.median;
    v.median_cop = group.at("cop")->stats.median;
    v.median_e2log = group.at("e2log")->stats.median;
    v.samples = std::min({group.at("sis")->stats.n, group.at("cop")->stats.n,
                          group.at("e2log")->stats.n});
    v.sis_le_cop = le_within(v.median_sis, v.median_cop, tolerance);
    v.cop_le_e2log = le_within(v.median_cop, v.median_e2log, tolerance);
    out.push_back(v);
  }
  return out;
}

void CampaignOptions::validate() const {
  if (amplitudes.empty()) throw DomainError("campaign needs at least one amplitude");
  for (double a : amplitudes) {
    if (!(a >= 0.0) || a >= 1.0) throw DomainError("amplitudes must lie in [0, 1)");
  }
  if (flights < 1 || targets < 1) throw DomainError("flight and target counts must be >= 1");
  if (workers < 1) throw DomainError("worker count must be >= 1");
  if ((target_min.array() > target_max.array()).any()) {
    throw DomainError("target box lower bound exceeds upper bound");
  }
  for (const auto& t : trajectories) {
    if (t != "init" && t != "sis" && t != "e2log" && t != "cop" && t != "pi" && t != "theta") {
      throw DomainError("unknown trajectory type '" + t + "'");
    }
  }
}

std::vector<Vec3> draw_targets(const CampaignOptions& options, std::uint64_t seed) {
  Rng rng = make_rng(seed, stream::kTargets);
  std::vector<Vec3> out;
  for (int i = 0; i < options.targets; ++i) {
    Vec3 t;
    for (int k = 0; k < 3; ++k) t[k] = uniform(rng, options.target_min[k], options.target_max[k]);
    out.push_back(t);
  }
  return out;
}

}  // namespace cop
