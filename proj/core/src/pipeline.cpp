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

#include "cop/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "cop/errors.hpp"
#include "cop/rng.hpp"

namespace cop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VecX jittered_start(const Mission& mission, std::uint64_t seed, const PreconditionOptions& opt) {
  const WaypointLayout& layout = mission.layout();
  VecX a = layout.straight_line();
  Rng rng = make_rng(seed, stream::kPrecondition);
  const int per = layout.free_derivatives() ? layout.n_dim() * layout.n_jc() : layout.n_dim();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const int local = static_cast<int>(i % per);
    // Entries are stored dimension-major within a way-point; only the value
    // column (order 0) is jittered.
    const int dim = layout.free_derivatives() ? local / layout.n_jc() : local;
    const bool value = layout.free_derivatives() ? local % layout.n_jc() == 0 : true;
    if (!value) continue;
    const double amp = dim < 3 ? opt.jitter_position : opt.jitter_yaw;
    a[i] += uniform(rng, -amp, amp);
  }
  return mission.box().project(a);
}

}  // namespace

std::string to_string(StageStatus s) {
  switch (s) {
    case StageStatus::kNotRun:
      return "not-run";
    case StageStatus::kOk:
      return "ok";
    case StageStatus::kSkipped:
      return "skipped";
    case StageStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

PreconditionResult precondition(Mission& mission, std::uint64_t seed,
                                const PreconditionOptions& options) {
  PreconditionResult out;
  mission.set_tail_offset(Vec3::Zero());
  VecX a = jittered_start(mission, seed, options);

  Evaluation ev = mission.evaluate(a, ObjectiveMask::none());
  if (!(ev.rotor_violation <= 0.0)) {
    out.feasibility_ran = true;
    const Evaluator phase1 = [&](const VecX& x) {
      const Evaluation e = mission.evaluate(x, ObjectiveMask::none());
      return EvalResult{e.rotor_violation, VecX(), VecX::Constant(1, e.rotor_violation)};
    };
    out.feasibility = minimize(phase1, a, mission.box(), options.feasibility);
    if (!(out.feasibility.f_best <= 0.0)) {
      throw InfeasibleStartError("rotor bounds cannot be met for this target (violation " +
                                 std::to_string(out.feasibility.f_best) + ")");
    }
    a = out.feasibility.a_best;
  }

  // Phase 2: soft equality on the terminal position through the tail offset.
  FeasibleBox offset_box{VecX::Constant(3, -options.offset_limit),
                         VecX::Constant(3, options.offset_limit)};
  const Evaluator phase2 = [&](const VecX& d) {
    Mission m = mission;
    m.set_tail_offset(d);
    const Evaluation e = m.evaluate(a, ObjectiveMask::none());
    VecX c(1);
    c << e.rotor_margin;
    return EvalResult{e.terminal_error, c, VecX::Constant(1, e.terminal_error)};
  };
  out.terminal = minimize(phase2, VecX::Zero(3), offset_box, options.terminal);
  out.tail_offset = out.terminal.a_best;
  mission.set_tail_offset(out.tail_offset);
  out.a_init = a;
  out.evaluation = mission.evaluate(a, ObjectiveMask::none());
  out.terminal_ok = out.evaluation.terminal_error < options.terminal_tolerance;
  return out;
}

StageResult run_stage(const Mission& mission, const std::string& name, const VecX& a0,
                      const OptimizerBudget& budget, const ParetoAnchors* anchors,
                      const VecX& weights, double rho, Augmentation augmentation) {
  StageResult st;
  st.name = name;
  ObjectiveMask mask = ObjectiveMask::all();
  std::function<double(const Evaluation&)> objective;
  if (name == "pi" || name == "theta") {
    mask.e2log = false;
    const bool pi = name == "pi";
    objective = [pi](const Evaluation& e) { return pi ? e.pi : e.theta; };
  } else if (name == "e2log") {
    mask = {false, false, true};
    objective = [](const Evaluation& e) { return e.e2log; };
  } else if (name == "sis" || name == "cop") {
    if (anchors == nullptr) throw DomainError("scalarized stage needs anchors");
    objective = [anchors, weights, rho, augmentation](const Evaluation& e) {
      return tchebycheff(e.objectives(), *anchors, weights, rho, augmentation);
    };
  } else {
    throw DomainError("unknown stage '" + name + "'");
  }

  const Evaluator eval = [&](const VecX& a) {
    const Evaluation e = mission.evaluate(a, mask);
    VecX c(1);
    c << (std::isfinite(e.rotor_margin) ? e.rotor_margin : -1.0);
    return EvalResult{objective(e), c, e.objectives()};
  };
  try {
    st.run = minimize(eval, a0, mission.box(), budget);
    st.a = st.run.a_best;
    st.status = StageStatus::kOk;
  } catch (const Error& e) {
    st.status = StageStatus::kFailed;
    st.reason = e.what();
    st.a = mission.box().project(a0);
  }
  st.evaluation = mission.evaluate(st.a, ObjectiveMask::all());
  return st;
}

bool posterior_filter(double sis_cop, double e2log_cop, double sis_init, double e2log_init) {
  return sis_cop < sis_init && e2log_cop < e2log_init;
}

const StageResult& PipelineResult::stage(const std::string& name) const {
  if (name == "init") return init;
  if (name == "pi") return pi;
  if (name == "theta") return theta;
  if (name == "e2log") return e2log;
  if (name == "sis") return sis;
  if (name == "cop") return cop;
  throw DomainError("unknown stage '" + name + "'");
}

PipelineResult run_pipeline(Mission& mission, const PipelineOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult res;
  res.precondition = precondition(mission, options.seed, options.precondition);
  const VecX& a_init = res.precondition.a_init;

  res.init.name = "init";
  res.init.status = StageStatus::kOk;
  res.init.a = a_init;
  res.init.evaluation = mission.evaluate(a_init, ObjectiveMask::all());

  res.pi = run_stage(mission, "pi", a_init, options.stage);
  res.theta = run_stage(mission, "theta", a_init, options.stage);
  res.e2log = run_stage(mission, "e2log", a_init, options.stage);

  const StageResult* individual[] = {&res.pi, &res.theta, &res.e2log};
  bool individual_ok = true;
  res.cost_matrix.resize(3, 3);
  for (int j = 0; j < 3; ++j) {
    individual_ok = individual_ok && individual[j]->status == StageStatus::kOk;
    res.cost_matrix.row(j) = individual[j]->evaluation.objectives().transpose();
  }
  const bool finite = res.cost_matrix.allFinite();

  auto skip = [&](StageResult& st, const std::string& name, const std::string& why) {
    st.name = name;
    st.status = StageStatus::kSkipped;
    st.reason = why;
    st.a = a_init;
    st.evaluation = res.init.evaluation;
  };
  auto scalarized = [&](StageResult& st, const std::string& name, const VecX& w) {
    if (!individual_ok || !finite) {
      skip(st, name, "an individual stage failed; anchors unavailable");
      return;
    }
    for (int i = 0; i < 3; ++i) {
      if (w[i] > 0.0 && res.anchors.degenerate(i)) {
        skip(st, name, "degenerate anchor for objective " + std::to_string(i));
        return;
      }
    }
    st = run_stage(mission, name, a_init, options.stage, &res.anchors, w, options.rho,
                   options.augmentation);
  };

  if (finite) {
    res.anchors = compute_anchors_unchecked(res.cost_matrix);
    res.anchors_degenerate = res.anchors.any_degenerate();
  } else {
    res.anchors_degenerate = true;
  }
  scalarized(res.sis, "sis", options.sis_weights);
  scalarized(res.cop, "cop", options.cop_weights);

  if (res.cop.status == StageStatus::kOk) {
    res.sis_utility_init =
        tchebycheff(res.init.evaluation.objectives(), res.anchors, options.sis_weights, options.rho,
                    options.augmentation);
    res.sis_utility_cop =
        tchebycheff(res.cop.evaluation.objectives(), res.anchors, options.sis_weights, options.rho,
                    options.augmentation);
    res.accepted = posterior_filter(res.sis_utility_cop, res.cop.evaluation.e2log,
                                    res.sis_utility_init, res.init.evaluation.e2log);
    res.verdict = res.accepted ? "accepted" : "rejected";
  } else {
    res.accepted = false;
    res.verdict = "rejected: COP stage " + to_string(res.cop.status);
  }
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace cop
