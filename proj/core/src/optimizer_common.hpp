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

#ifndef COP_SRC_OPTIMIZER_COMMON_HPP
#define COP_SRC_OPTIMIZER_COMMON_HPP

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "cop/errors.hpp"
#include "cop/optimizer.hpp"

namespace cop::detail {

struct Sample {
  VecX a;
  double f = std::numeric_limits<double>::infinity();
  VecX c;
  double violation = std::numeric_limits<double>::infinity();
  VecX tracked;
};

inline double max_violation(const VecX& c) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!std::isfinite(c[i])) return std::numeric_limits<double>::infinity();
    v = std::max(v, -c[i]);
  }
  return v;
}

/// Counts evaluations, records history and tracks the best feasible point.
class Recorder {
 public:
  Recorder(const Evaluator& evaluate, const OptimizerBudget& budget, Eigen::Index n)
      : evaluate_(evaluate),
        budget_(budget),
        window_(budget.stagnation_evaluations > 0 ? budget.stagnation_evaluations
                                                  : 10 * static_cast<int>(n + 1)),
        start_(std::chrono::steady_clock::now()) {}

  Sample eval(const VecX& a) {
    EvalResult r = evaluate_(a);
    Sample s;
    s.a = a;
    s.f = r.objective;
    s.c = std::move(r.constraints);
    s.tracked = std::move(r.tracked);
    s.violation = max_violation(s.c);
    // A failed evaluation counts as a constraint violation.
    if (!std::isfinite(s.f)) {
      s.f = std::numeric_limits<double>::infinity();
      s.violation = std::numeric_limits<double>::infinity();
    }
    ++count_;
    const bool feasible = s.violation <= budget_.constraint_tol;
    if (feasible && (!have_best_ || s.f < best_.f)) {
      if (!have_best_ || s.f < best_.f - budget_.stagnation_tol) {
        last_improvement_ = count_;
        ++improvements_;
      }
      best_ = s;
      have_best_ = true;
    }
    if (!have_best_ && (!have_least_ || s.violation < least_.violation)) {
      least_ = s;
      have_least_ = true;
    }
    HistoryEntry h;
    h.evaluation = count_;
    h.objective = s.f;
    h.max_violation = s.violation;
    h.feasible = feasible;
    h.best_feasible = have_best_ ? best_.f : std::numeric_limits<double>::infinity();
    h.tracked = s.tracked;
    history_.push_back(std::move(h));
    return s;
  }

  int count() const { return count_; }
  bool exhausted() const { return count_ >= budget_.max_evaluations; }
  bool target_hit() const { return have_best_ && best_.f <= budget_.target; }
  bool stagnated() const { return count_ - last_improvement_ >= window_; }
  bool have_best() const { return have_best_; }
  /// True when no evaluation improved on the first feasible value.
  bool never_improved() const { return improvements_ <= 1; }
  /// Reason for a converged search: "stagnation" when it never improved.
  std::string converged_reason(const char* converged) const {
    return never_improved() ? "stagnation" : converged;
  }
  const Sample& best() const { return best_; }

  /// Returns the shared termination reason when one applies, else empty.
  std::string stop_reason() const {
    if (target_hit()) return "target";
    if (exhausted()) return "budget";
    if (stagnated()) return "stagnation";
    return {};
  }

  OptRun finish(const std::string& termination, int iterations) {
    OptRun run;
    run.evaluations = count_;
    run.iterations = iterations;
    run.termination = termination;
    run.history = std::move(history_);
    run.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (!have_best_) {
      throw InfeasibleStartError("no feasible point found after " + std::to_string(count_) +
                                 " evaluations (least violation " +
                                 std::to_string(have_least_ ? least_.violation : 0.0) + ")");
    }
    run.a_best = best_.a;
    run.f_best = best_.f;
    run.tracked_best = best_.tracked;
    run.feasible = true;
    return run;
  }

 private:
  const Evaluator& evaluate_;
  const OptimizerBudget& budget_;
  int window_;
  std::chrono::steady_clock::time_point start_;
  int count_ = 0;
  int last_improvement_ = 0;
  int improvements_ = 0;
  bool have_best_ = false;
  bool have_least_ = false;
  Sample best_;
  Sample least_;
  std::vector<HistoryEntry> history_;
};

OptRun nelder_mead(const Evaluator& evaluate, const VecX& a0, const FeasibleBox& box,
                   const OptimizerBudget& budget);

/// Start simplex: a0 plus one step of length rho along each axis, flipped
/// when the step would leave the box.
MatX initial_simplex(const VecX& a0, const FeasibleBox& box, double rho);

}  // namespace cop::detail

#endif  // COP_SRC_OPTIMIZER_COMMON_HPP
