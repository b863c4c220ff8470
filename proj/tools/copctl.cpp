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

// copctl: command-line front end for preconditioning, optimization,
// evaluation, export and campaign reports.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cop/campaign.hpp"
#include "cop/config.hpp"
#include "cop/errors.hpp"
#include "cop/export.hpp"
#include "cop/pipeline.hpp"
#include "cop/sensitivity.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cop;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
  std::vector<double> target;
};

RunConfig load(const GlobalOptions& g) {
  RunConfig c = g.config.empty() ? RunConfig::desk() : load_config(g.config);
  if (g.seed) c.pipeline.seed = *g.seed;
  if (!g.target.empty()) c.mission.target = Vec3(g.target[0], g.target[1], g.target[2]);
  return c;
}

fs::path output_dir(const GlobalOptions& g, const RunConfig& c) {
  return g.out.empty() ? fs::path(c.output_dir) : fs::path(g.out);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in '" + p.string() + "': " + e.what());
  }
}

VecX vec_from(const json& j) {
  VecX v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

/// A finished pipeline run read back from its directory.
struct StoredRun {
  fs::path dir;
  RunConfig config;
  Vec3 tail_offset = Vec3::Zero();
  std::map<std::string, VecX> stages;

  Mission mission() const {
    Mission m(config.mission, config.evaluation);
    m.set_tail_offset(tail_offset);
    return m;
  }
};

StoredRun read_run(const fs::path& dir) {
  StoredRun r;
  r.dir = dir;
  r.config = load_config((dir / "config.ini").string());
  const json summary = read_json(dir / "summary.json");
  const VecX off = vec_from(summary.at("precondition").at("tail_offset"));
  if (off.size() != 3) throw Error("bad tail offset in " + (dir / "summary.json").string());
  r.tail_offset = off;
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    const fs::path p = dir / "stages" / (std::string(name) + ".json");
    if (fs::exists(p)) r.stages[name] = vec_from(read_json(p).at("a"));
  }
  return r;
}

/// Run directories below `root`: the directory itself when it holds a run,
/// else every immediate subdirectory that does, in name order.
std::vector<fs::path> find_runs(const fs::path& root) {
  if (fs::exists(root / "summary.json")) return {root};
  std::vector<fs::path> out;
  if (fs::is_directory(root)) {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.json")) out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no run directories found under '" + root.string() + "'");
  return out;
}

/// The decision vector and mission to act on: a stored stage when --run is
/// given, otherwise the preconditioned start for the config.
struct Subject {
  RunConfig config;
  std::optional<Mission> mission;
  VecX a;
  std::string label;
};

Subject resolve_subject(const GlobalOptions& g, const std::string& run, const std::string& stage) {
  Subject s;
  if (!run.empty()) {
    const StoredRun r = read_run(run);
    const auto it = r.stages.find(stage);
    if (it == r.stages.end()) throw Error("run '" + run + "' has no stage '" + stage + "'");
    s.config = r.config;
    s.mission.emplace(r.mission());
    s.a = it->second;
    s.label = stage;
  } else {
    s.config = load(g);
    s.mission.emplace(s.config.mission, s.config.evaluation);
    s.a = precondition(*s.mission, s.config.pipeline.seed, s.config.pipeline.precondition).a_init;
    s.label = "init";
  }
  return s;
}

void print_evaluation_text(const std::string& label, const Evaluation& e) {
  std::cout << label << ":\n"
            << "  F_Pi            " << e.pi << "\n"
            << "  F_Theta         " << e.theta << "\n"
            << "  F_E2LOG         " << e.e2log << "  (lambda_min " << e.lambda_min << ")\n"
            << "  rotor margin    " << e.rotor_margin << "\n"
            << "  terminal error  " << e.terminal_error << " m\n"
            << "  tracking error  " << e.tracking_error << " m\n";
  if (e.diverged) std::cout << "  diverged: " << e.failure << "\n";
}

// ---- subcommands ---------------------------------------------------------

int cmd_precondition(const GlobalOptions& g) {
  const RunConfig c = load(g);
  Mission m(c.mission, c.evaluation);
  const PreconditionResult r = precondition(m, c.pipeline.seed, c.pipeline.precondition);
  json j;
  j["a_init"] = std::vector<double>(r.a_init.data(), r.a_init.data() + r.a_init.size());
  j["tail_offset"] = {r.tail_offset.x(), r.tail_offset.y(), r.tail_offset.z()};
  j["feasibility_ran"] = r.feasibility_ran;
  j["terminal_ok"] = r.terminal_ok;
  j["evaluation"] = json::parse(evaluation_json(r.evaluation));
  if (!g.out.empty()) {
    const fs::path dir = g.out;
    write_text(dir / "config.ini", to_ini(c));
    write_text(dir / "precondition.json", j.dump(2) + "\n");
    std::ostringstream csv;
    write_trajectory_csv(csv, m.trajectory(r.a_init), 0.01);
    write_text(dir / "trajectories" / "init.csv", csv.str());
  }
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "tail offset     " << r.tail_offset.transpose() << " m\n"
              << "terminal error  " << r.evaluation.terminal_error << " m ("
              << (r.terminal_ok ? "within" : "outside") << " tolerance)\n"
              << "rotor margin    " << r.evaluation.rotor_margin << "\n";
  }
  return 0;
}

json stage_summary(const StageResult& s) {
  json j;
  j["name"] = s.name;
  j["status"] = to_string(s.status);
  if (!s.reason.empty()) j["reason"] = s.reason;
  j["evaluations"] = s.run.evaluations;
  j["termination"] = s.run.termination;
  j["evaluation"] = json::parse(evaluation_json(s.evaluation));
  return j;
}

json pipeline_once(const RunConfig& c, const fs::path& dir) {
  Mission m(c.mission, c.evaluation);
  const PipelineResult r = run_pipeline(m, c.pipeline);
  write_run_directory(dir, c, m, r);
  json j;
  j["directory"] = dir.string();
  j["target"] = {c.mission.target.x(), c.mission.target.y(), c.mission.target.z()};
  j["verdict"] = r.verdict;
  j["accepted"] = r.accepted;
  json stages = json::array();
  for (const char* name : {"init", "pi", "theta", "e2log", "sis", "cop"}) {
    stages.push_back(stage_summary(r.stage(name)));
  }
  j["stages"] = stages;
  return j;
}

int cmd_optimize(const GlobalOptions& g, const std::string& objective, int targets) {
  RunConfig c = load(g);
  const fs::path dir = output_dir(g, c);
  json out;
  if (objective == "pipeline") {
    if (targets <= 1) {
      out = pipeline_once(c, dir);
    } else {
      CampaignOptions co = c.campaign;
      co.targets = targets;
      const std::vector<Vec3> points = draw_targets(co, c.pipeline.seed);
      out = json::array();
      for (std::size_t k = 0; k < points.size(); ++k) {
        RunConfig ck = c;
        ck.mission.target = points[k];
        ck.pipeline.seed = c.pipeline.seed + k;
        out.push_back(pipeline_once(ck, dir / ("target_" + std::to_string(k))));
      }
    }
  } else {
    Mission m(c.mission, c.evaluation);
    const PreconditionResult pre = precondition(m, c.pipeline.seed, c.pipeline.precondition);
    StageResult st;
    if (objective == "sis" || objective == "cop") {
      MatX cost(3, 3);
      int j = 0;
      for (const char* name : {"pi", "theta", "e2log"}) {
        const StageResult s = run_stage(m, name, pre.a_init, c.pipeline.stage);
        if (s.status != StageStatus::kOk) throw Error("stage " + s.name + " failed: " + s.reason);
        cost.row(j++) = s.evaluation.objectives().transpose();
      }
      const ParetoAnchors anchors = compute_anchors(cost);
      const VecX& w = objective == "sis" ? c.pipeline.sis_weights : c.pipeline.cop_weights;
      st = run_stage(m, objective, pre.a_init, c.pipeline.stage, &anchors, w, c.pipeline.rho,
                     c.pipeline.augmentation);
    } else {
      st = run_stage(m, objective, pre.a_init, c.pipeline.stage);
    }
    json s = json::parse(optrun_json(st.run));
    s["name"] = st.name;
    s["status"] = to_string(st.status);
    s["reason"] = st.reason;
    s["evaluation"] = json::parse(evaluation_json(st.evaluation));
    write_text(dir / "config.ini", to_ini(c));
    write_text(dir / "stages" / (objective + ".json"), s.dump(2) + "\n");
    std::ostringstream csv;
    write_trajectory_csv(csv, m.trajectory(st.a), 0.01);
    write_text(dir / "trajectories" / (objective + ".csv"), csv.str());
    out = stage_summary(st);
    out["directory"] = dir.string();
    if (st.status != StageStatus::kOk) {
      std::cerr << "error: stage " << objective << " failed: " << st.reason << "\n";
      if (g.json) std::cout << out.dump(2) << "\n";
      return 2;
    }
  }
  if (g.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    const auto show = [](const json& run) {
      if (run.contains("verdict")) {
        std::cout << run["directory"].get<std::string>() << ": " << run["verdict"].get<std::string>() << "\n";
        for (const auto& s : run["stages"]) {
          std::cout << "  " << s["name"].get<std::string>() << "  " << s["status"].get<std::string>()
                    << "  F = (" << s["evaluation"]["pi"] << ", " << s["evaluation"]["theta"] << ", "
                    << s["evaluation"]["e2log"] << ")\n";
        }
      } else {
        std::cout << run["directory"].get<std::string>() << ": stage " << run["name"].get<std::string>()
                  << " " << run["status"].get<std::string>() << " after " << run["evaluations"]
                  << " evaluations (" << run["termination"].get<std::string>() << ")\n";
      }
    };
    if (out.is_array()) {
      for (const auto& r : out) show(r);
    } else {
      show(out);
    }
  }
  return 0;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& run, const std::string& stage) {
  const Subject s = resolve_subject(g, run, stage);
  const Evaluation e = s.mission->evaluate(s.a);
  if (g.json) {
    std::cout << evaluation_json(e) << "\n";
  } else {
    print_evaluation_text(s.label, e);
  }
  return e.diverged ? 2 : 0;
}

int cmd_export(const GlobalOptions& g, const std::string& run, const std::string& stage, double rate,
               const MeasurementNoise& noise) {
  const Subject s = resolve_subject(g, run, stage);
  const fs::path dir = g.out.empty() ? fs::path(s.config.output_dir) / "export" : fs::path(g.out);
  const Mission& m = *s.mission;
  std::ostringstream traj, trace, sens, meas;
  write_trajectory_csv(traj, m.trajectory(s.a), 1.0 / rate);
  const SimTrace tr = m.propagate(s.a);
  tr.require_ok();
  write_trace_csv(trace, tr);
  write_sensitivity_csv(sens, tr);
  const MeasurementTrace mt = export_measurements(m, s.a, rate, noise, s.config.pipeline.seed);
  write_measurements_csv(meas, mt);
  write_text(dir / "trajectory.csv", traj.str());
  write_text(dir / "trace.csv", trace.str());
  write_text(dir / "sensitivity.csv", sens.str());
  write_text(dir / "measurements.csv", meas.str());
  json j;
  j["directory"] = dir.string();
  j["stage"] = s.label;
  j["rate"] = rate;
  j["noise"] = {{"position", noise.position},
                {"orientation", noise.orientation},
                {"body_rate", noise.body_rate},
                {"accelerometer", noise.accelerometer}};
  j["seed"] = s.config.pipeline.seed;
  j["files"] = {"trajectory.csv", "trace.csv", "sensitivity.csv", "measurements.csv"};
  write_text(dir / "export.json", j.dump(2) + "\n");
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote trajectory, trace, sensitivity and measurement CSVs to " << dir.string() << "\n";
  }
  return 0;
}

int cmd_report(const GlobalOptions& g, const std::vector<std::string>& run_roots) {
  std::vector<fs::path> dirs;
  for (const auto& root : run_roots) {
    for (const auto& d : find_runs(root)) dirs.push_back(d);
  }
  std::optional<RunConfig> overrides;
  if (!g.config.empty()) overrides = load(g);
  std::vector<CampaignEntry> entries;
  CampaignOptions co;
  std::uint64_t seed = 0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const StoredRun r = read_run(dirs[k]);
    co = overrides ? overrides->campaign : r.config.campaign;
    co.validate();
    seed = g.seed ? *g.seed : r.config.pipeline.seed;
    const Mission m = r.mission();
    for (const auto& traj : co.trajectories) {
      const auto it = r.stages.find(traj);
      if (it == r.stages.end()) throw Error(dirs[k].string() + " has no stage '" + traj + "'");
      const double lambda = m.evaluate(it->second, {false, false, true}).lambda_min;
      for (double amp : co.amplitudes) {
        const FlightSamples s = monte_carlo_tracking(m, it->second, amp, co.flights,
                                                     derive_seed(seed, k), co.law, co.workers);
        CampaignEntry e;
        e.target = static_cast<int>(k);
        e.trajectory = traj;
        e.amplitude = amp;
        e.samples = s.errors;
        e.diverged = s.diverged;
        e.saturated = s.saturated;
        e.lambda_min = lambda;
        if (!s.errors.empty()) e.stats = summarize(s.errors);
        entries.push_back(std::move(e));
      }
    }
  }
  std::vector<OrderingVerdict> verdicts;
  const auto has = [&](const char* t) {
    return std::find(co.trajectories.begin(), co.trajectories.end(), t) != co.trajectories.end();
  };
  if (has("sis") && has("cop") && has("e2log")) verdicts = campaign_compare(entries);
  const std::string doc = campaign_json(entries, verdicts, co, seed);
  if (!g.out.empty()) write_text(fs::path(g.out) / "campaign.json", doc + "\n");
  if (g.json) {
    std::cout << doc << "\n";
    return 0;
  }
  std::cout << "runs: " << dirs.size() << ", flights per trajectory: " << co.flights
            << ", law: " << to_string(co.law) << "\n";
  std::cout << "target  trajectory  amplitude  median      q1          q3          lambda_min\n";
  for (const auto& e : entries) {
    std::printf("%-7d %-11s %-10g %-11.5g %-11.5g %-11.5g %.5g\n", e.target, e.trajectory.c_str(),
                e.amplitude, e.stats.median, e.stats.q1, e.stats.q3, e.lambda_min);
  }
  for (const auto& v : verdicts) {
    std::cout << "target " << v.target << " amplitude " << v.amplitude << ": SIS <= COP "
              << (v.sis_le_cop ? "yes" : "no") << ", COP <= E2LOG " << (v.cop_le_e2log ? "yes" : "no")
              << " (n = " << v.samples << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control- and observability-aware quadrotor trajectory planning", "copctl"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "INI config file (defaults to the desk settings)");
  app.add_option("--seed", g.seed, "Master seed (overrides [pipeline] seed)");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--json", g.json, "Print a machine-readable JSON summary");
  app.add_option("--target", g.target, "Target position x y z (overrides [mission] target)")
      ->expected(3);

  auto* pre = app.add_subcommand("precondition", "Build a feasible start trajectory that reaches the target");
  pre->fallthrough();

  std::string objective;
  int targets = 1;
  auto* opt = app.add_subcommand("optimize", "Optimize one objective or run the full pipeline");
  opt->add_option("--objective", objective, "pi, theta, e2log, sis, cop or pipeline")
      ->required()
      ->check(CLI::IsMember({"pi", "theta", "e2log", "sis", "cop", "pipeline"}));
  opt->add_option("--targets", targets, "Pipeline only: number of random targets from [campaign]")
      ->check(CLI::PositiveNumber);
  opt->fallthrough();

  std::string run, stage = "cop";
  auto* eval = app.add_subcommand("evaluate", "Evaluate every objective of a trajectory");
  eval->add_option("--run", run, "Run directory to read the trajectory from");
  eval->add_option("--stage", stage, "Stage of the run directory")->capture_default_str();
  eval->fallthrough();

  double rate = 100.0;
  MeasurementNoise noise;
  auto* exp = app.add_subcommand("export", "Export trajectory, trace, sensitivity and measurement CSVs");
  exp->add_option("--run", run, "Run directory to read the trajectory from");
  exp->add_option("--stage", stage, "Stage of the run directory")->capture_default_str();
  exp->add_option("--rate", rate, "Measurement rate, Hz")->check(CLI::PositiveNumber)->capture_default_str();
  exp->add_option("--noise-position", noise.position, "Position noise std, m");
  exp->add_option("--noise-orientation", noise.orientation, "Quaternion noise std");
  exp->add_option("--noise-rate", noise.body_rate, "Body-rate noise std, rad/s");
  exp->add_option("--noise-accel", noise.accelerometer, "Accelerometer noise std, m/s^2");
  exp->fallthrough();

  std::vector<std::string> runs;
  auto* rep = app.add_subcommand("report", "Monte Carlo tracking campaign over finished runs (read-only)");
  rep->add_option("--run", runs, "Run directory, or a directory of runs")->required();
  rep->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*pre) return cmd_precondition(g);
    if (*opt) return cmd_optimize(g, objective, targets);
    if (*eval) return cmd_evaluate(g, run, stage);
    if (*exp) return cmd_export(g, run, stage, rate, noise);
    if (*rep) return cmd_report(g, runs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
