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

#include "cop/export.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cop/errors.hpp"
#include "cop/rng.hpp"

namespace cop {

namespace {

using json = nlohmann::ordered_json;

/// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json vec_json(const VecX& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const MatX& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json evaluation_to_json(const Evaluation& e) {
  json j;
  j["pi"] = number_or_null(e.pi);
  j["theta"] = number_or_null(e.theta);
  j["e2log"] = number_or_null(e.e2log);
  j["lambda_min"] = number_or_null(e.lambda_min);
  j["rotor_margin"] = number_or_null(e.rotor_margin);
  j["rotor_violation"] = number_or_null(e.rotor_violation);
  j["terminal_error"] = number_or_null(e.terminal_error);
  j["tracking_error"] = number_or_null(e.tracking_error);
  j["saturation_samples"] = e.saturation_samples;
  j["bound_violations"] = e.bound_violations;
  j["diverged"] = e.diverged;
  j["failure"] = e.failure;
  return j;
}

json optrun_to_json(const OptRun& run) {
  json j;
  j["a_best"] = vec_json(run.a_best);
  j["f_best"] = number_or_null(run.f_best);
  j["tracked_best"] = vec_json(run.tracked_best);
  j["feasible"] = run.feasible;
  j["evaluations"] = run.evaluations;
  j["iterations"] = run.iterations;
  j["termination"] = run.termination;
  json hist = json::array();
  for (const auto& h : run.history) {
    json e;
    e["evaluation"] = h.evaluation;
    e["objective"] = number_or_null(h.objective);
    e["max_violation"] = number_or_null(h.max_violation);
    e["feasible"] = h.feasible;
    e["best_feasible"] = number_or_null(h.best_feasible);
    json tr = json::array();
    for (Eigen::Index i = 0; i < h.tracked.size(); ++i) tr.push_back(number_or_null(h.tracked[i]));
    e["tracked"] = tr;
    hist.push_back(e);
  }
  j["history"] = hist;
  return j;
}

json waypoints_json(const Mission& mission, const VecX& a) {
  json arr = json::array();
  for (const auto& wp : mission.layout().unpack(a)) {
    json w;
    w["t"] = wp.t;
    w["values"] = mat_json(wp.values);
    arr.push_back(w);
  }
  return arr;
}

json anchors_to_json(const PipelineResult& r, const PipelineOptions* opts) {
  json j;
  j["objectives"] = {"pi", "theta", "e2log"};
  j["cost_matrix"] = r.cost_matrix.size() ? mat_json(r.cost_matrix) : json::array();
  j["utopia"] = vec_json(r.anchors.utopia);
  j["nadir"] = vec_json(r.anchors.nadir);
  j["degenerate"] = r.anchors_degenerate;
  if (opts) {
    j["sis_weights"] = vec_json(opts->sis_weights);
    j["cop_weights"] = vec_json(opts->cop_weights);
    j["rho"] = opts->rho;
    j["augmentation"] = opts->augmentation == Augmentation::kRaw ? "raw" : "normalized";
  }
  return j;
}

json pipeline_to_json(const PipelineResult& r) {
  json j;
  json pre;
  pre["a_init"] = vec_json(r.precondition.a_init);
  pre["tail_offset"] = vec_json(r.precondition.tail_offset);
  pre["feasibility_ran"] = r.precondition.feasibility_ran;
  pre["terminal_error"] = number_or_null(r.precondition.evaluation.terminal_error);
  pre["terminal_ok"] = r.precondition.terminal_ok;
  pre["terminal_evaluations"] = r.precondition.terminal.evaluations;
  j["precondition"] = pre;
  json stages;
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    const StageResult& st = r.stage(name);
    json s;
    s["status"] = to_string(st.status);
    s["reason"] = st.reason;
    s["a"] = vec_json(st.a);
    s["evaluations"] = st.run.evaluations;
    s["termination"] = st.run.termination;
    s["evaluation"] = evaluation_to_json(st.evaluation);
    stages[name] = s;
  }
  j["stages"] = stages;
  j["anchors"] = anchors_to_json(r, nullptr);
  j["sis_utility_init"] = number_or_null(r.sis_utility_init);
  j["sis_utility_cop"] = number_or_null(r.sis_utility_cop);
  j["accepted"] = r.accepted;
  j["verdict"] = r.verdict;
  return j;
}

json stats_json(const SummaryStats& s) {
  json j;
  j["n"] = s.n;
  j["q1"] = s.q1;
  j["median"] = s.median;
  j["q3"] = s.q3;
  j["min"] = s.min;
  j["max"] = s.max;
  j["mean"] = s.mean;
  return j;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const PiecewiseBezier& traj, double dt) {
  if (!(dt > 0.0)) throw DomainError("sample interval must be positive");
  static const char* names[] = {"x", "y", "z", "yaw"};
  static const char* prefix[] = {"", "d", "dd", "ddd", "dddd"};
  const int orders = std::min(traj.n_jc(), 5);
  out << "t";
  for (int k = 0; k < orders; ++k) {
    for (int d = 0; d < traj.n_dim(); ++d) {
      out << ',' << prefix[k] << (d < 4 ? names[d] : ("q" + std::to_string(d)).c_str());
    }
  }
  out << '\n';
  const auto grid = output_grid(traj.start_time(), traj.end_time(), dt);
  for (double t : grid) {
    out << num(t);
    for (int k = 0; k < orders; ++k) {
      const VecX v = traj.evaluate(t, k);
      for (Eigen::Index d = 0; d < v.size(); ++d) out << ',' << num(v[d]);
    }
    out << '\n';
  }
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,xi_x,xi_y,xi_z,u1,u2,u3,u4,cmd1,cmd2,cmd3,cmd4\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << num(trace.times[k]);
    for (int i = 0; i < state_index::kSize; ++i) out << ',' << num(trace.states[k][i]);
    for (int i = 0; i < 3; ++i) out << ',' << num(trace.controller_states[k][i]);
    for (int i = 0; i < 4; ++i) out << ',' << num(trace.inputs[k][i]);
    for (int i = 0; i < 4; ++i) out << ',' << num(trace.commands[k][i]);
    out << '\n';
  }
}

void write_sensitivity_csv(std::ostream& out, const SimTrace& trace) {
  if (trace.sensitivities.size() != trace.size()) {
    throw DomainError("trace carries no sensitivity bundle");
  }
  out << "t";
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 13; ++i) out << ",pi_" << i << '_' << j;
  }
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 4; ++i) out << ",theta_" << i << '_' << j;
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& b = trace.sensitivities[k];
    out << num(trace.times[k]);
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 13; ++i) out << ',' << num(b.pi(i, j));
    }
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 4; ++i) out << ',' << num(b.theta(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const MatX& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << num(m(r, c));
    }
    out << '\n';
  }
}

MeasurementTrace export_measurements(const Mission& mission, const VecX& a, double rate,
                                     const MeasurementNoise& noise, std::uint64_t seed) {
  if (!(rate > 0.0)) throw DomainError("measurement rate must be positive");
  if (!(noise.position >= 0.0 && noise.orientation >= 0.0 && noise.body_rate >= 0.0 &&
        noise.accelerometer >= 0.0)) {
    throw DomainError("noise standard deviations must be non-negative");
  }
  const EvaluationSettings& es = mission.settings();
  const MeasurementModel& mm = es.measurement;
  IntegratorOptions io = es.integrator;
  io.sample_interval = 1.0 / rate;
  const SimTrace trace = cop::simulate(mission.initial_state(), Vec3::Zero(), mission.trajectory(a),
                                       es.model.nominal, es.model, mission.spec().duration, io);
  trace.require_ok();

  MeasurementTrace m;
  std::vector<double> stds;
  auto add = [&](std::initializer_list<const char*> names, double s) {
    for (const char* n : names) {
      m.channels.emplace_back(n);
      stds.push_back(s);
    }
  };
  if (mm.position) add({"px", "py", "pz"}, noise.position);
  if (mm.orientation) add({"qw", "qx", "qy", "qz"}, noise.orientation);
  if (mm.body_rate) add({"gx", "gy", "gz"}, noise.body_rate);
  if (mm.accelerometer) add({"ax", "ay", "az"}, noise.accelerometer);
  m.noise_std = Eigen::Map<const VecX>(stds.data(), static_cast<Eigen::Index>(stds.size()));

  const auto n = static_cast<Eigen::Index>(trace.size());
  const auto nc = static_cast<Eigen::Index>(m.channels.size());
  m.truth.resize(n, nc);
  m.measured.resize(n, nc);
  Rng rng = make_rng(seed, stream::kMeasurements);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const State13& x = trace.states[idx];
    const Vec4 u_model = mm.model_input(trace.inputs[idx]);
    const VecX xa = mm.augmented_state(x, es.model.nominal);
    const VecX y = mm.measure<double>(xa, u_model, es.model.constants, es.model.nominal);
    m.times.push_back(trace.times[idx]);
    m.rotor_speeds.push_back(trace.inputs[idx].cwiseMax(0.0).cwiseSqrt());
    m.truth.row(k) = y.transpose();
    for (Eigen::Index c = 0; c < nc; ++c) {
      const double s = m.noise_std[c];
      m.measured(k, c) = y[c] + (s > 0.0 ? s * standard_normal(rng) : 0.0);
    }
  }
  return m;
}

void write_measurements_csv(std::ostream& out, const MeasurementTrace& m) {
  out << "t,w1,w2,w3,w4";
  for (const auto& c : m.channels) out << ',' << c;
  out << '\n';
  for (std::size_t k = 0; k < m.times.size(); ++k) {
    out << num(m.times[k]);
    for (int i = 0; i < 4; ++i) out << ',' << num(m.rotor_speeds[k][i]);
    for (Eigen::Index c = 0; c < m.measured.cols(); ++c) {
      out << ',' << num(m.measured(static_cast<Eigen::Index>(k), c));
    }
    out << '\n';
  }
}

std::string evaluation_json(const Evaluation& e) { return evaluation_to_json(e).dump(2); }

std::string optrun_json(const OptRun& run) { return optrun_to_json(run).dump(2); }

std::string pipeline_summary_json(const PipelineResult& r) { return pipeline_to_json(r).dump(2); }

std::string campaign_json(const std::vector<CampaignEntry>& entries,
                          const std::vector<OrderingVerdict>& verdicts,
                          const CampaignOptions& options, std::uint64_t seed, double tolerance) {
  json j;
  j["seed"] = seed;
  j["law"] = to_string(options.law);
  j["flights"] = options.flights;
  j["amplitudes"] = options.amplitudes;
  json es = json::array();
  for (const auto& e : entries) {
    json o;
    o["target"] = e.target;
    o["trajectory"] = e.trajectory;
    o["amplitude"] = e.amplitude;
    o["stats"] = stats_json(e.stats);
    o["lambda_min"] = number_or_null(e.lambda_min);
    o["diverged"] = e.diverged;
    o["saturated"] = e.saturated;
    o["samples"] = e.samples;
    es.push_back(o);
  }
  j["entries"] = es;
  json vs = json::array();
  for (const auto& v : verdicts) {
    json o;
    o["target"] = v.target;
    o["amplitude"] = v.amplitude;
    o["samples"] = v.samples;
    o["median_sis"] = v.median_sis;
    o["median_cop"] = v.median_cop;
    o["median_e2log"] = v.median_e2log;
    o["sis_le_cop"] = v.sis_le_cop;
    o["cop_le_e2log"] = v.cop_le_e2log;
    vs.push_back(o);
  }
  j["verdicts"] = vs;
  j["tolerance"] = tolerance;
  return j.dump(2);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_run_directory(const std::filesystem::path& dir, const RunConfig& config,
                         const Mission& mission, const PipelineResult& result) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.ini", to_ini(config));
  write_text(dir / "summary.json", pipeline_summary_json(result) + "\n");
  write_text(dir / "anchors.json", anchors_to_json(result, &config.pipeline).dump(2) + "\n");
  json verdict;
  verdict["accepted"] = result.accepted;
  verdict["verdict"] = result.verdict;
  verdict["sis_utility_init"] = number_or_null(result.sis_utility_init);
  verdict["sis_utility_cop"] = number_or_null(result.sis_utility_cop);
  verdict["e2log_init"] = number_or_null(result.init.evaluation.e2log);
  verdict["e2log_cop"] = number_or_null(result.cop.evaluation.e2log);
  write_text(dir / "verdict.json", verdict.dump(2) + "\n");

  json timing;
  timing["pipeline_s"] = result.wall_time_s;
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    const StageResult& st = result.stage(name);
    json s = optrun_to_json(st.run);
    s["name"] = name;
    s["status"] = to_string(st.status);
    s["reason"] = st.reason;
    s["a"] = vec_json(st.a);
    s["waypoints"] = waypoints_json(mission, st.a);
    s["evaluation"] = evaluation_to_json(st.evaluation);
    write_text(dir / "stages" / (std::string(name) + ".json"), s.dump(2) + "\n");
    std::ostringstream csv;
    write_trajectory_csv(csv, mission.trajectory(st.a), 0.01);
    write_text(dir / "trajectories" / (std::string(name) + ".csv"), csv.str());
    timing[name] = st.run.wall_time_s;
  }
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace cop
