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

#ifndef COP_SCALARIZATION_HPP
#define COP_SCALARIZATION_HPP

#include "cop/types.hpp"

namespace cop {

/// Objective vector (F_Pi, F_Theta, F_E2LOG) or any k objectives.
using ObjectiveVector = VecX;

/// Utopia and nadir points of k objectives, with the per-objective minimizer
/// index into the cost matrix.
struct ParetoAnchors {
  VecX utopia;
  VecX nadir;

  int size() const { return static_cast<int>(utopia.size()); }
  /// True when objective i cannot be normalized (nadir equals utopia).
  bool degenerate(int i) const;
  bool any_degenerate() const;
};

/// Anchors from a k x k matrix whose entry (j, i) is F_i evaluated at the
/// minimizer of objective j: utopia_i = M(i, i), nadir_i = max_j M(j, i).
///
/// Throws DegenerateRangeError when k > 1 and some objective has
/// nadir == utopia. A single objective (k = 1) is returned as-is.
ParetoAnchors compute_anchors(const MatX& cost_matrix);

/// Same construction without the degeneracy check.
ParetoAnchors compute_anchors_unchecked(const MatX& cost_matrix);

/// Augmented weighted Tchebycheff utility
///   U = max_i lambda_i |F_i - F_O,i| + rho sum_j |F_j - F_O,j|,
///   lambda_i = w_i / |F_N,i - F_O,i|.
///
/// Weights must be non-negative and sum to one; rho must be non-negative.
/// A non-finite objective yields +infinity.
double tchebycheff(const ObjectiveVector& F, const ParetoAnchors& anchors, const VecX& weights,
                   double rho);

/// Same max term, with every augmentation gap divided by its anchor range
///   U = max_i lambda_i |F_i - F_O,i| + rho sum_j |F_j - F_O,j| / |F_N,j - F_O,j|.
/// Objectives with a degenerate range and zero weight drop out of the sum.
double tchebycheff_normalized(const ObjectiveVector& F, const ParetoAnchors& anchors,
                              const VecX& weights, double rho);

/// How the augmentation sum is scaled in the pipeline's scalarized stages.
enum class Augmentation { kRaw, kNormalized };

/// Dispatches to tchebycheff or tchebycheff_normalized.
double tchebycheff(const ObjectiveVector& F, const ParetoAnchors& anchors, const VecX& weights,
                   double rho, Augmentation augmentation);

/// Recommended augmentation range.
inline constexpr double kRhoMin = 1e-4;
inline constexpr double kRhoMax = 1e-2;

/// Weighted sum of normalized objectives (reference only, used in tests).
double linear_scalarization(const ObjectiveVector& F, const ParetoAnchors& anchors,
                            const VecX& weights);

}  // namespace cop

#endif  // COP_SCALARIZATION_HPP
