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

#ifndef COP_OPTIMIZER_HPP
#define COP_OPTIMIZER_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cop/trajectory.hpp"
#include "cop/types.hpp"

namespace cop {

/// One objective evaluation. Constraints are feasible when >= 0.
struct EvalResult {
  double objective = 0.0;
  VecX constraints;
  /// Extra per-evaluation values recorded in the history (e.g. every
  /// individual objective while a scalarized one is minimized).
  VecX tracked;
};

using Evaluator = std::function<EvalResult(const VecX& a)>;

enum class OptimizerMethod { kCobyla, kNelderMead };

struct OptimizerBudget {
  int max_evaluations = 150;
  double rho_begin = 0.3;
  double rho_end = 1e-4;
  double constraint_tol = 1e-6;
  /// Stop as soon as a feasible objective at or below this is found.
  double target = -std::numeric_limits<double>::infinity();
  /// Stop after this many evaluations without improving the best feasible
  /// value by more than stagnation_tol; 0 picks 10 (n + 1).
  int stagnation_evaluations = 0;
  double stagnation_tol = 0.0;
  OptimizerMethod method = OptimizerMethod::kCobyla;
  /// Quadratic penalty weight used by the Nelder-Mead fallback.
  double penalty = 1e6;
};

struct HistoryEntry {
  int evaluation = 0;
  double objective = 0.0;
  double max_violation = 0.0;
  bool feasible = true;
  double best_feasible = 0.0;  ///< best feasible objective seen so far
  VecX tracked;
};

struct OptRun {
  VecX a_best;
  double f_best = std::numeric_limits<double>::quiet_NaN();
  VecX tracked_best;
  bool feasible = true;
  std::vector<HistoryEntry> history;
  int evaluations = 0;
  int iterations = 0;
  std::string termination;
  double wall_time_s = 0.0;
};

/// Derivative-free constrained minimization over a box.
///
/// kCobyla builds linear models of the objective and constraints over a
/// simplex of n + 1 points and takes trust-region steps of radius rho,
/// shrinking rho from rho_begin to rho_end. kNelderMead minimizes the
/// objective plus a quadratic constraint penalty.
///
/// The start point is projected onto the box. Throws InfeasibleStartError
/// when no evaluated point satisfies the constraints.
OptRun minimize(const Evaluator& evaluate, const VecX& a0, const FeasibleBox& box,
                const OptimizerBudget& budget);

namespace detail {
/// Minimizes g^T d over {||d|| <= radius, lo <= d <= hi, c + A^T d >= 0}
/// (columns of A are constraint gradients). When the linearized constraints
/// cannot be met inside the region the step reduces their violation instead.
VecX trust_region_step(const VecX& g, const VecX& c, const MatX& A, const VecX& lo, const VecX& hi,
                       double radius);
}  // namespace detail

}  // namespace cop

#endif  // COP_OPTIMIZER_HPP
