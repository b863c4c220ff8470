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

#include "cop/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cop/errors.hpp"

namespace cop {

namespace {

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

long long to_int(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

bool to_bool(const std::string& s) {
  const std::string l = boost::to_lower_copy(s);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw std::invalid_argument("expected a boolean");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  if (boost::trim_copy(s).empty()) return parts;
  boost::split(parts, s, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  return parts;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_list(s)) out.push_back(to_double(p));
  return out;
}

std::string join(const std::vector<std::string>& parts) { return boost::join(parts, ", "); }

std::string fmt_list(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(fmt(x));
  return join(parts);
}

std::string fmt_vec(const VecX& v) {
  return fmt_list(std::vector<double>(v.data(), v.data() + v.size()));
}

VecX to_vec(const std::string& s, Eigen::Index expected) {
  const auto v = to_doubles(s);
  if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " values");
  }
  return Eigen::Map<const VecX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Three values, or one value broadcast to all three.
Vec3 to_vec3_broadcast(const std::string& s) {
  const auto v = to_doubles(s);
  if (v.size() == 1) return Vec3::Constant(v[0]);
  if (v.size() == 3) return Vec3(v[0], v[1], v[2]);
  throw std::invalid_argument("expected 1 or 3 values");
}

struct Binding {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

std::vector<Binding> bindings(RunConfig& c) {
  std::vector<Binding> b;
  auto num = [&b](std::string sec, std::string key, double& ref) {
    b.push_back({sec, key, [&ref](const std::string& s) { ref = to_double(s); },
                 [&ref] { return fmt(ref); }});
  };
  auto integer = [&b](std::string sec, std::string key, int& ref) {
    b.push_back({sec, key, [&ref](const std::string& s) { ref = static_cast<int>(to_int(s)); },
                 [&ref] { return std::to_string(ref); }});
  };
  auto flag = [&b](std::string sec, std::string key, bool& ref) {
    b.push_back({sec, key, [&ref](const std::string& s) { ref = to_bool(s); },
                 [&ref] { return std::string(ref ? "true" : "false"); }});
  };
  auto vec3 = [&b](std::string sec, std::string key, Vec3& ref) {
    b.push_back({sec, key, [&ref](const std::string& s) { ref = to_vec(s, 3); },
                 [&ref] { return fmt_vec(ref); }});
  };
  auto gain = [&b](std::string sec, std::string key, Vec3& ref) {
    b.push_back({sec, key, [&ref](const std::string& s) { ref = to_vec3_broadcast(s); },
                 [&ref] { return fmt_vec(ref); }});
  };

  MissionSpec& m = c.mission;
  vec3("mission", "start", m.start);
  vec3("mission", "target", m.target);
  num("mission", "start_yaw", m.start_yaw);
  num("mission", "target_yaw", m.target_yaw);
  num("mission", "duration", m.duration);
  integer("mission", "pieces", m.n_pieces);
  integer("mission", "joining_conditions", m.n_jc);
  flag("mission", "free_derivatives", m.free_derivatives);
  vec3("mission", "workspace_min", m.workspace_min);
  vec3("mission", "workspace_max", m.workspace_max);
  num("mission", "yaw_limit", m.yaw_limit);
  num("mission", "derivative_limit", m.derivative_limit);

  ClosedLoopModel& model = c.evaluation.model;
  num("vehicle", "mass", model.constants.mass);
  b.push_back({"vehicle", "inertia",
               [&model](const std::string& s) {
                 const auto v = to_doubles(s);
                 if (v.size() == 3) {
                   model.constants.inertia = Vec3(v[0], v[1], v[2]).asDiagonal();
                 } else if (v.size() == 9) {
                   model.constants.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
                 } else {
                   throw std::invalid_argument("expected 3 diagonal or 9 row-major values");
                 }
               },
               [&model] {
                 const Mat3& J = model.constants.inertia;
                 if (J.isDiagonal()) return fmt_vec(J.diagonal());
                 const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = J;
                 return fmt_list(std::vector<double>(r.data(), r.data() + 9));
               }});
  num("vehicle", "arm_length", model.constants.arm_length);
  num("vehicle", "gravity", model.constants.gravity);
  num("vehicle", "kf", model.nominal.kf);
  num("vehicle", "km", model.nominal.km);
  num("vehicle", "u_min", model.controller.bounds.u_min);
  num("vehicle", "u_max", model.controller.bounds.u_max);

  gain("controller", "k_r", model.gains.k_r);
  gain("controller", "k_v", model.gains.k_v);
  gain("controller", "k_i", model.gains.k_i);
  gain("controller", "k_q", model.gains.k_q);
  gain("controller", "k_w", model.gains.k_w);
  num("controller", "integrator_limit", model.controller.integrator_limit);

  IntegratorOptions& io = c.evaluation.integrator;
  b.push_back({"integrator", "method",
               [&io](const std::string& s) {
                 if (s == "rk4") {
                   io.method = IntegratorMethod::kRungeKutta4;
                 } else if (s == "dopri5") {
                   io.method = IntegratorMethod::kDormandPrince;
                 } else {
                   throw std::invalid_argument("expected rk4 or dopri5");
                 }
               },
               [&io] {
                 return std::string(io.method == IntegratorMethod::kRungeKutta4 ? "rk4" : "dopri5");
               }});
  num("integrator", "step", io.step);
  num("integrator", "abs_tol", io.abs_tol);
  num("integrator", "rel_tol", io.rel_tol);
  num("integrator", "sample_interval", io.sample_interval);
  num("integrator", "divergence_bound", io.divergence_bound);

  SensitivityCostOptions& sc = c.evaluation.sensitivity_cost;
  b.push_back({"sensitivity", "norm",
               [&sc](const std::string& s) {
                 if (s == "frobenius") {
                   sc.norm = MatrixNorm::kFrobenius;
                 } else if (s == "spectral") {
                   sc.norm = MatrixNorm::kSpectral;
                 } else {
                   throw std::invalid_argument("expected frobenius or spectral");
                 }
               },
               [&sc] { return std::string(sc.norm == MatrixNorm::kFrobenius ? "frobenius" : "spectral"); }});
  b.push_back({"sensitivity", "pi_rows",
               [&sc](const std::string& s) {
                 if (s == "position") {
                   sc.pi_rows = PiRows::kPosition;
                 } else if (s == "all") {
                   sc.pi_rows = PiRows::kAll;
                 } else {
                   throw std::invalid_argument("expected position or all");
                 }
               },
               [&sc] { return std::string(sc.pi_rows == PiRows::kPosition ? "position" : "all"); }});

  MeasurementModel& mm = c.evaluation.measurement;
  GramianOptions& go = c.evaluation.gramian;
  integer("observability", "taylor_order", go.taylor_order);
  integer("observability", "segments", go.segments);
  integer("observability", "quadrature_nodes", go.quadrature_nodes);
  b.push_back({"observability", "scaling",
               [&go](const std::string& s) { go.scaling = to_vec(s, -1); },
               [&go] { return fmt_vec(go.scaling); }});
  flag("observability", "position", mm.position);
  flag("observability", "orientation", mm.orientation);
  flag("observability", "body_rate", mm.body_rate);
  flag("observability", "accelerometer", mm.accelerometer);
  flag("observability", "augment_parameters", mm.augment_parameters);
  flag("observability", "rotor_speed_inputs", mm.rotor_speed_inputs);

  OptimizerBudget& ob = c.pipeline.stage;
  b.push_back({"optimizer", "method",
               [&ob](const std::string& s) {
                 if (s == "cobyla") {
                   ob.method = OptimizerMethod::kCobyla;
                 } else if (s == "nelder-mead") {
                   ob.method = OptimizerMethod::kNelderMead;
                 } else {
                   throw std::invalid_argument("expected cobyla or nelder-mead");
                 }
               },
               [&ob] {
                 return std::string(ob.method == OptimizerMethod::kCobyla ? "cobyla" : "nelder-mead");
               }});
  integer("optimizer", "evaluations", ob.max_evaluations);
  num("optimizer", "rho_begin", ob.rho_begin);
  num("optimizer", "rho_end", ob.rho_end);
  num("optimizer", "constraint_tol", ob.constraint_tol);
  integer("optimizer", "stagnation_evaluations", ob.stagnation_evaluations);
  num("optimizer", "stagnation_tol", ob.stagnation_tol);
  num("optimizer", "penalty", ob.penalty);

  PreconditionOptions& po = c.pipeline.precondition;
  integer("precondition", "feasibility_evaluations", po.feasibility.max_evaluations);
  integer("precondition", "terminal_evaluations", po.terminal.max_evaluations);
  num("precondition", "terminal_target", po.terminal.target);
  num("precondition", "terminal_tolerance", po.terminal_tolerance);
  num("precondition", "offset_limit", po.offset_limit);
  num("precondition", "jitter_position", po.jitter_position);
  num("precondition", "jitter_yaw", po.jitter_yaw);

  PipelineOptions& pl = c.pipeline;
  b.push_back({"pipeline", "seed", [&pl](const std::string& s) {
                 pl.seed = static_cast<std::uint64_t>(std::stoull(s));
               },
               [&pl] { return std::to_string(pl.seed); }});
  b.push_back({"pipeline", "sis_weights", [&pl](const std::string& s) { pl.sis_weights = to_vec(s, 3); },
               [&pl] { return fmt_vec(pl.sis_weights); }});
  b.push_back({"pipeline", "cop_weights", [&pl](const std::string& s) { pl.cop_weights = to_vec(s, 3); },
               [&pl] { return fmt_vec(pl.cop_weights); }});
  num("pipeline", "rho", pl.rho);
  b.push_back({"pipeline", "augmentation",
               [&pl](const std::string& s) {
                 if (s == "normalized") {
                   pl.augmentation = Augmentation::kNormalized;
                 } else if (s == "raw") {
                   pl.augmentation = Augmentation::kRaw;
                 } else {
                   throw std::invalid_argument("expected normalized or raw");
                 }
               },
               [&pl] {
                 return std::string(pl.augmentation == Augmentation::kRaw ? "raw" : "normalized");
               }});

  CampaignOptions& co = c.campaign;
  b.push_back({"campaign", "amplitudes", [&co](const std::string& s) { co.amplitudes = to_doubles(s); },
               [&co] { return fmt_list(co.amplitudes); }});
  integer("campaign", "flights", co.flights);
  integer("campaign", "targets", co.targets);
  integer("campaign", "workers", co.workers);
  b.push_back({"campaign", "law", [&co](const std::string& s) { co.law = parse_perturbation_law(s); },
               [&co] { return to_string(co.law); }});
  vec3("campaign", "target_min", co.target_min);
  vec3("campaign", "target_max", co.target_max);
  b.push_back({"campaign", "trajectories", [&co](const std::string& s) { co.trajectories = split_list(s); },
               [&co] { return join(co.trajectories); }});

  b.push_back({"output", "directory", [&c](const std::string& s) { c.output_dir = s; },
               [&c] { return c.output_dir; }});
  return b;
}

/// Drops '#' comment lines, which the INI reader does not know.
std::string strip_hash_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') continue;
    out << line << '\n';
  }
  return out.str();
}

void validate(const RunConfig& c) {
  c.mission.validate();
  c.evaluation.model.constants.validate();
  c.evaluation.model.gains.validate();
  c.evaluation.model.nominal.validate();
  c.evaluation.integrator.validate();
  c.evaluation.measurement.validate();
  c.evaluation.gramian.validate();
  c.campaign.validate();
  const RotorBounds& rb = c.evaluation.model.controller.bounds;
  if (!(rb.u_min >= 0.0) || !(rb.u_max > rb.u_min)) {
    throw DomainError("rotor bounds need 0 <= u_min < u_max");
  }
}

}  // namespace

RunConfig RunConfig::desk() {
  RunConfig c;
  c.evaluation.integrator.method = IntegratorMethod::kRungeKutta4;
  c.evaluation.integrator.step = 2e-3;
  c.evaluation.integrator.sample_interval = 1e-2;
  c.evaluation.gramian.segments = 20;
  c.mission.duration = 10.0;
  c.mission.n_pieces = 3;
  c.pipeline.stage.max_evaluations = 150;
  return c;
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(strip_hash_comments(text));
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c = base;
  const auto table = bindings(c);
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw ConfigError("key '" + section + "' must be inside a section");
    }
    for (const auto& [key, value] : keys) {
      const auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) {
        return b.section == section && b.key == key;
      });
      if (it == table.end()) throw ConfigError("unknown config key [" + section + "] " + key);
      try {
        it->set(boost::trim_copy(value.data()));
      } catch (const std::exception& e) {
        throw ConfigError("bad value for [" + section + "] " + key + ": " + e.what());
      }
    }
  }
  try {
    validate(c);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string to_ini(const RunConfig& config) {
  RunConfig copy = config;
  const auto table = bindings(copy);
  std::ostringstream out;
  std::string section;
  for (const auto& b : table) {
    if (b.section != section) {
      if (!section.empty()) out << '\n';
      section = b.section;
      out << '[' << section << "]\n";
    }
    out << b.key << " = " << b.get() << '\n';
  }
  return out.str();
}

}  // namespace cop
